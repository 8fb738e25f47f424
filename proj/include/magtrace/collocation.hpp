#pragma once

#include <cstddef>
#include <vector>

namespace magtrace {

// Laplace eigenvalues on the genus-2 surface of maximal symmetry, computed
// with a basis of particular solutions collocated on the walls of the
// regular-octagon fundamental domain.
//
// Basis: u_n = R_{|n|}(r; lambda) e^{i n phi} in geodesic polar coordinates
// about the octagon center, where R_m solves the radial equation
//   R'' + coth(r) R' + (lambda - m^2 / sinh^2 r) R = 0
// with the regular branch R ~ r^m at the origin.  Every combination solves
// (Delta + lambda)u = 0 on the disk; lambda is an eigenvalue exactly when
// some combination also satisfies the eight side-pairing identifications
// u(s_k z) = u(z).
//
// Detection: sample wall curves z_j and their partners s_k z_j, stack the
// difference rows A[j] = u_n(z_j) - u_n(s_k z_j) on top of a normalization
// block B (wall values plus interior samples), orthonormalize the columns of
// [A; B] by a thin QR, and take singular values of the A part of Q.  A
// singular value near zero flags a combination that is automorphic on the
// walls without being small on the surface; the number of independent such
// combinations is the multiplicity.  Candidate directions are re-tested on
// an independent set of wall curves to reject combinations that merely
// vanish on the sampled curves.
struct CollocationConfig {
    // wall sampling: per side, curves at these parameter offsets from the wall
    int points_per_side = 40;
    std::vector<double> wall_offsets = {0.0, 0.25};
    // normalization block
    int interior_points = 80;
    unsigned long long interior_seed = 7;
    // angular truncation |n| <= clamp(ceil(sqrt(lambda) sinh r_max) + n_margin,
    // n_min, n_cap); r_max is the largest sampled radius.  The floor matters:
    // the octagon walls carry angular detail well beyond the propagating
    // orders, and the dip depth improves by an order of magnitude between
    // |n| <= 48 and |n| <= 60 on the lowest eigenvalue.
    int n_margin = 15;
    int n_min = 60;
    int n_cap = 150;
    // radial ODE accuracy
    double radial_rtol = 1e-10;
    double radial_atol = 1e-13;
    // independent wall curves used to validate candidate directions
    double validation_offset = 0.12;
    int validation_points = 64;
    // A span direction is genuine when its fresh-wall residual stays below
    // validation_genuine AND its sampled-wall defect stays below
    // sampled_genuine.  The first rejects overfits of the sampled walls, the
    // second rejects eigenfunctions of nearby levels reconstructed at an
    // off-eigenvalue dip (their sampled defect grows with the lambda offset,
    // about 4e-3 per unit, while at-vertex directions sit near 1e-5).
    double validation_genuine = 8e-5;
    double sampled_genuine = 8e-5;
    // a grid local minimum is a candidate dip when the detection statistic
    // rises by at least this factor on both sides within the ridge window
    double min_prominence = 2.0;
    double ridge_window = 0.25;
    // detect dips on the fresh-wall span residual instead of the sampled
    // singular values; slower per grid point, but immune to wall placements
    // whose sampled stack carries flat near-null directions
    bool span_detect = false;
    // scan parallelism; 0 = hardware concurrency
    int threads = 0;
};

// cheap settings for in-test cross-checks (coarser sampling and tolerances;
// good to roughly 1e-3 on the lowest eigenvalues)
CollocationConfig coarse_collocation_config();

// singular-value profile at one lambda, smallest first, with the fresh-wall
// validation residual of each corresponding direction
struct SigmaProbe {
    double lambda{};
    std::vector<double> sigmas;
    std::vector<double> validations;
    // fresh-wall pairing residuals minimised jointly over the span of the
    // probed directions (ascending).  Raw directions inside a near-degenerate
    // sigma cluster are arbitrary rotations of one another, so per-direction
    // residuals can all look bad even when the span contains the eigenspace;
    // the count of small entries here is the robust multiplicity estimate.
    std::vector<double> subspace;
    // sampled-wall pairing defect of each subspace direction (same order as
    // `subspace`).  An eigenfunction of a *nearby* level can slip under the
    // fresh-wall threshold at an off-eigenvalue dip, but it keeps a sampled
    // defect proportional to its distance in lambda; genuine directions at
    // their own eigenvalue keep both numbers small.
    std::vector<double> span_sigmas;
};

// a refined dip of the detection statistic that produced no validated
// direction (an overfit of the sampled walls); kept for diagnostics
struct RejectedDip {
    double lambda{};
    double span{};  // smallest fresh-wall span residual at the vertex
};

struct EigenvalueHit {
    double lambda{};
    long long multiplicity{};
    double sigma{};       // largest sampled-wall defect among the genuine directions
    double validation{};  // worst fresh-wall residual among the genuine directions
    double detect{};      // sqrt(sigma_1 sigma_2) at the refined dip
};

class OctagonCollocation {
  public:
    explicit OctagonCollocation(CollocationConfig cfg = {});

    const CollocationConfig& config() const { return cfg_; }

    SigmaProbe probe(double lambda, int count = 8) const;

    // Scan [lo, hi] with the given grid step, refine every prominent local
    // minimum of the detection statistic, and keep the dips with at least one
    // validated direction.  Returned hits are sorted by lambda.  When given,
    // `rejected` collects the refined dips that failed validation.
    std::vector<EigenvalueHit> find_eigenvalues(double lo, double hi, double step = 0.02,
                                                std::vector<RejectedDip>* rejected = nullptr) const;

  private:
    struct Pairing {
        int base{}, image{};
    };
    struct Evaluation;  // sigmas and (optionally) validated directions

    Evaluation evaluate(double lambda, int n_directions) const;
    double detect_stat(double lambda) const;

    CollocationConfig cfg_;
    std::vector<double> rs_, phis_;  // all sample points, polar about center
    std::vector<Pairing> pairs_;     // wall constraints (indices into rs_)
    std::vector<int> norm_rows_;     // normalization block rows
    std::vector<Pairing> val_pairs_; // independent-wall constraints
    int stack_pts_{};                // points 0..stack_pts_-1 enter the QR stack
    double r_max_{};
};

}  // namespace magtrace
