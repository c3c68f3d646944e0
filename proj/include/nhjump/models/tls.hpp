#pragma once

#include "nhjump/liouvillian.hpp"

namespace nhjump {

struct TlsParams {
    double w0 = 1.0;  // level splitting
    double gp = 0.0;  // decay (sigma-) rate
    double gx = 0.0;  // bit-flip (sigma x) rate
    double gz = 0.0;  // phase-flip (sigma z) rate
};

// two-level atom with decay, bit-flip and phase-flip channels; the channel
// operators enter the dissipator unscaled (g F rho F - (g/2){F^dag F, rho})
inline LindbladModel tls_model(const TlsParams& p) {
    if (p.gp < 0 || p.gx < 0 || p.gz < 0) throw InvalidState("negative rate");
    auto ops = pauli_ops();
    return {2, p.w0 / 2 * ops.sz, {{p.gp, ops.sm}, {p.gx, ops.sx}, {p.gz, ops.sz}}, false};
}

// closed forms for the corrections of the vectorized two-level problem, in the
// product basis (uu, ud, du, dd). psi1/psi2 columns hold the expansion of each
// corrected mode over the free modes.
struct TlsReference {
    Vec e0, e1, e2;
    Mat psi1, psi2;
};

inline TlsReference tls_reference(const TlsParams& p) {
    if (!(p.gp > 0) || p.w0 == 0)
        throw InvalidState("closed forms need gp > 0 and a finite splitting");
    const double w0 = p.w0, gp = p.gp, gx = p.gx, gz = p.gz;
    TlsReference r;
    r.e0.resize(4);
    r.e0 << cxd(0, -(gp + gx + gz)), cxd(w0, -(gp / 2 + gx + gz)),
        cxd(-w0, -(gp / 2 + gx + gz)), cxd(0, -(gx + gz));
    r.e1.resize(4);
    r.e1 << cxd(0, gz), cxd(0, -gz), cxd(0, -gz), cxd(0, gz);
    r.e2.resize(4);
    r.e2 << cxd(0, -gx * (gp + gx) / gp), cxd(-gx * gx / (2 * w0), 0),
        cxd(gx * gx / (2 * w0), 0), cxd(0, gx * (gp + gx) / gp);
    r.psi1 = Mat::Zero(4, 4);
    r.psi1(3, 0) = -(gp + gx) / gp;
    r.psi1(2, 1) = cxd(0, gx / (2 * w0));
    r.psi1(1, 2) = cxd(0, -gx / (2 * w0));
    r.psi1(0, 3) = gx / gp;
    r.psi2 = Mat::Zero(4, 4);
    return r;
}

}  // namespace nhjump
