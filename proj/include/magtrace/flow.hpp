#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "magtrace/geometry.hpp"
#include "magtrace/moebius.hpp"
#include "magtrace/ode.hpp"
#include "magtrace/util.hpp"

namespace magtrace {

// Parameters of the magnetic flow on the energy shell X_E:
// H = sqrt(y^2(px^2+py^2) + 1) = E, kinetic level E0 = E^2 - 1.
struct FlowParams {
    double E{}, B{};
    double E0{};                    // E^2 - 1
    double alpha{};                 // sqrt(E0)/E
    double beta{};                  // -B/E
    std::optional<double> delta;    // sqrt(E0 - B^2)/E when E0 > B^2

    FlowParams(double E_, double B_);
};

// Point on X_E in angle coordinates: momenta are
// p_x = (sqrt(E0)/y) cos(theta), p_y = (sqrt(E0)/y) sin(theta).
struct PhaseState {
    double x{0.0}, y{1.0}, theta{0.0};
    PhaseState() = default;
    PhaseState(double x_, double y_, double theta_);
};

double hamiltonian(double x, double y, double px, double py);

// Right-hand side (dx/dt, dy/dt, dtheta/dt) of the reduced flow:
// xdot = (sqrt(E0)/E) y cos(theta), ydot = (sqrt(E0)/E) y sin(theta),
// thetadot = -(sqrt(E0)/E) cos(theta) - B/E.
std::array<double, 3> flow_rhs(const PhaseState& s, const FlowParams& p);

struct Trajectory {
    FlowParams params;
    std::vector<double> t;                       // strictly increasing sample times
    std::vector<PhaseState> states;              // matching samples
    double tol{};                                // integrator tolerance used
    std::size_t n_accepted{}, n_rejected{};

    // Dense evaluation anywhere in [0, T]; the fourth component accumulates
    // the line integral of the connection form A = dx/y along the projection.
    PhaseState state_at(double t) const;
    double connection_integral_at(double t) const;
    double duration() const { return t.empty() ? 0.0 : t.back(); }

    ode::Solution<4> raw;                        // (x, y, theta, int A)
};

// Integration failure carrying the partial trajectory up to the failure time.
struct IntegrationError : NumericalError {
    IntegrationError(const std::string& what, Trajectory partial_)
        : NumericalError(what), partial(std::move(partial_)) {}
    Trajectory partial;
};

// Integrate the flow for time T >= 0 from s0; samples are the accepted steps.
Trajectory integrate_flow(const PhaseState& s0, const FlowParams& p, double T,
                          double tol = 1e-10);

struct ConservationReport {
    double energy_drift{};   // max |H - E| over samples
    double c_drift{};        // max deviation of c = thetadot/y from its initial value
};
ConservationReport conserved_quantities(const Trajectory& traj);

// First integral of the pseudosphere system: I = sinh^2(r) phidot + B cosh(r).
double pseudosphere_invariant(double r, double rdot, double phi, double phidot, double B);

// exp(t (alpha e1 + beta e3)) with e1 = diag(1/2,-1/2), e3 = [[0,1/2],[-1/2,0]].
MoebiusElement sl2_exp(double t, double alpha, double beta);

// Right translation g * exp(t (alpha e1 + beta e3)).
MoebiusElement group_flow(const MoebiusElement& g, double t, double alpha, double beta);

// The N(x) A(y) K(theta - pi/2) chart: bijection between PhaseState and group
// elements; g maps the base point i to x + iy and theta = phi + pi/2.
MoebiusElement state_to_group(const PhaseState& s);
PhaseState group_to_state(const MoebiusElement& g);

// Conjugator C with C (alpha e1 + beta e3) C^{-1} = delta e1,
// delta = sqrt(E0 - B^2)/E.  Requires the strictly hypercyclic regime.
struct GeodesicConjugation {
    double delta{};
    MoebiusElement conjugator;
};
GeodesicConjugation conjugate_to_geodesic(const FlowParams& p);

// Strong-field first integral: evaluates f at the magnetic-circle center,
// which lies at arclength artanh(1/B) = (1/2) log((B+1)/(B-1)) along the
// inward normal eta (eta perpendicular to xi, xi wedge eta < 0).
double mane_first_integral(const HPoint& p, double xi, double B,
                           const std::function<double(const HPoint&)>& f);

}  // namespace magtrace
