#include "magtrace/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace magtrace {

FlowParams::FlowParams(double E_, double B_) : E(E_), B(B_) {
    if (!(E > 1.0))
        throw std::invalid_argument("FlowParams: need E > 1, got " + format_double(E));
    if (!(B > 0.0))
        throw std::invalid_argument("FlowParams: need B > 0, got " + format_double(B));
    E0 = E * E - 1.0;
    alpha = std::sqrt(E0) / E;
    beta = -B / E;
    if (E0 > B * B) delta = std::sqrt(E0 - B * B) / E;
}

PhaseState::PhaseState(double x_, double y_, double theta_)
    : x(x_), y(y_), theta(normalize_angle(theta_)) {
    if (!(y > 0.0))
        throw std::invalid_argument("PhaseState: y must be positive, got " + format_double(y));
}

double hamiltonian(double x, double y, double px, double py) {
    (void)x;
    if (!(y > 0.0)) throw std::domain_error("hamiltonian: y must be positive");
    return std::sqrt(y * y * (px * px + py * py) + 1.0);
}

std::array<double, 3> flow_rhs(const PhaseState& s, const FlowParams& p) {
    const double v = p.alpha;  // sqrt(E0)/E
    return {v * s.y * std::cos(s.theta), v * s.y * std::sin(s.theta),
            -v * std::cos(s.theta) - p.B / p.E};
}

PhaseState Trajectory::state_at(double time) const {
    const auto y = raw.at(time);
    return PhaseState(y[0], y[1], y[2]);
}

double Trajectory::connection_integral_at(double time) const {
    return raw.at(time)[3];
}

Trajectory integrate_flow(const PhaseState& s0, const FlowParams& p, double T, double tol) {
    if (!(T >= 0.0)) throw std::invalid_argument("integrate_flow: need T >= 0");
    if (!(tol >= 1e-13 && tol <= 1e-3))
        throw std::invalid_argument("integrate_flow: tol outside [1e-13, 1e-3]");

    // Fourth component accumulates int A = int dx/y = int (sqrt(E0)/E) cos(theta) dt
    // along the projected curve (used for holonomy checks).
    auto rhs = [&p](double, const ode::State<4>& y, ode::State<4>& dy) {
        const double v = p.alpha;
        const double ct = std::cos(y[2]), st = std::sin(y[2]);
        dy[0] = v * y[1] * ct;
        dy[1] = v * y[1] * st;
        dy[2] = -v * ct - p.B / p.E;
        dy[3] = v * ct;
    };

    ode::Controls ctl;
    ctl.rtol = tol;
    ctl.atol = tol * 1e-2;

    Trajectory traj{.params = p, .t = {}, .states = {}, .tol = tol,
                    .n_accepted = 0, .n_rejected = 0, .raw = {}};
    auto fill_samples = [&traj, &s0] {
        traj.n_accepted = traj.raw.n_accepted;
        traj.n_rejected = traj.raw.n_rejected;
        traj.t.reserve(traj.raw.steps.size() + 1);
        traj.states.reserve(traj.raw.steps.size() + 1);
        traj.t.push_back(0.0);
        traj.states.push_back(s0);
        for (const auto& st : traj.raw.steps) {
            const double te = st.t0 + st.h;
            const auto y = st.eval(te);
            traj.t.push_back(te);
            traj.states.push_back(PhaseState(y[0], y[1], y[2]));
        }
    };
    try {
        traj.raw = ode::integrate<4>(rhs, {s0.x, s0.y, s0.theta, 0.0}, 0.0, T, ctl,
                                     &traj.raw);
    } catch (const NumericalError& e) {
        fill_samples();
        throw IntegrationError(std::string(e.what()) + " (magnetic flow)", traj);
    }
    fill_samples();
    return traj;
}

ConservationReport conserved_quantities(const Trajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("conserved_quantities: empty trajectory");
    const FlowParams& p = traj.params;
    const double sqE0 = std::sqrt(p.E0);
    ConservationReport rep;
    double c0 = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const PhaseState& s = traj.states[i];
        // momenta on X_E from the angle coordinate
        const double px = sqE0 / s.y * std::cos(s.theta);
        const double py = sqE0 / s.y * std::sin(s.theta);
        rep.energy_drift = std::max(rep.energy_drift,
                                    std::fabs(hamiltonian(s.x, s.y, px, py) - p.E));
        const double c = flow_rhs(s, p)[2] / s.y;
        if (i == 0) c0 = c;
        rep.c_drift = std::max(rep.c_drift, std::fabs(c - c0));
    }
    return rep;
}

double pseudosphere_invariant(double r, double rdot, double phi, double phidot, double B) {
    (void)rdot;
    (void)phi;
    const double sh = std::sinh(r);
    return sh * sh * phidot + B * std::cosh(r);
}

MoebiusElement sl2_exp(double t, double alpha, double beta) {
    // M = alpha e1 + beta e3 = [[alpha/2, beta/2], [-beta/2, -alpha/2]],
    // M^2 = mu^2 I with mu^2 = (alpha^2 - beta^2)/4, so
    // exp(tM) = c0(t) I + c1(t) M with (c0, c1) given by cosh/cos branches.
    const double m2 = (alpha * alpha - beta * beta) / 4.0;
    const double z = t * t * m2;
    double c0, c1;
    if (std::fabs(z) < 1e-8 || std::fabs(alpha * alpha - beta * beta) < 1e-10) {
        // series in z = t^2 mu^2: cosh(t mu) = 1 + z/2 + z^2/24,
        // sinh(t mu)/mu = t (1 + z/6 + z^2/120)
        c0 = 1.0 + z / 2.0 + z * z / 24.0;
        c1 = t * (1.0 + z / 6.0 + z * z / 120.0);
    } else if (m2 > 0.0) {
        const double mu = std::sqrt(m2);
        c0 = std::cosh(t * mu);
        c1 = std::sinh(t * mu) / mu;
    } else {
        const double om = std::sqrt(-m2);
        c0 = std::cos(t * om);
        c1 = std::sin(t * om) / om;
    }
    return MoebiusElement(c0 + c1 * alpha / 2, c1 * beta / 2,
                          -c1 * beta / 2, c0 - c1 * alpha / 2);
}

MoebiusElement group_flow(const MoebiusElement& g, double t, double alpha, double beta) {
    return g * sl2_exp(t, alpha, beta);
}

MoebiusElement state_to_group(const PhaseState& s) {
    // N(x) A(y) K(phi) with phi = theta - pi/2.
    const double sy = std::sqrt(s.y);
    const MoebiusElement na(sy, s.x / sy, 0.0, 1.0 / sy);
    return na * rotation_about_i(s.theta - M_PI / 2);
}

PhaseState group_to_state(const MoebiusElement& g) {
    const std::complex<double> z = g.apply({0.0, 1.0});
    // K(phi) contributes phi = -2 arg(c i + d) = -2 atan2(c, d).
    const double phi = -2.0 * std::atan2(g.c, g.d);
    return PhaseState(z.real(), z.imag(), phi + M_PI / 2);
}

GeodesicConjugation conjugate_to_geodesic(const FlowParams& p) {
    if (!p.delta)
        throw std::invalid_argument("not in hypercyclic regime (need E0 > B^2)");
    const double alpha = p.alpha, beta = p.beta;
    const double delta = std::sqrt(alpha * alpha - beta * beta);
    // Eigenvectors of M = [[alpha/2, beta/2], [-beta/2, -alpha/2]] for
    // eigenvalues +-delta/2: v+ = (beta, delta - alpha), v- = (beta, -(alpha + delta)).
    // P = [v+ v-] (det-normalized) diagonalizes M; C = P^{-1}.
    double pa = beta, pb = beta;
    double pc = delta - alpha, pd = -(alpha + delta);
    double det = pa * pd - pb * pc;
    if (det < 0) { pb = -pb; pd = -pd; det = -det; }
    const double s = 1.0 / std::sqrt(det);
    const MoebiusElement P(pa * s, pb * s, pc * s, pd * s);
    return {*p.delta, P.inverse()};
}

double mane_first_integral(const HPoint& p, double xi, double B,
                           const std::function<double(const HPoint&)>& f) {
    if (!(B > 1.0))
        throw std::invalid_argument("evaluation distance diverges at or below B=1");
    const double s = 0.5 * std::log((B + 1.0) / (B - 1.0));  // artanh(1/B)
    // eta is xi rotated so that xi ^ eta < 0 (clockwise quarter turn).
    return f(geodesic_point(p, xi - M_PI / 2, s));
}

}  // namespace magtrace
