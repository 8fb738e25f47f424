#include "magtrace/collocation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>

#include "magtrace/geometry.hpp"
#include "magtrace/moebius.hpp"
#include "magtrace/ode.hpp"
#include "magtrace/util.hpp"

namespace magtrace {

namespace {

// run fn(0..n-1) on a small thread pool; rethrows the first worker exception
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    const int nw = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

int hardware_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

int angular_order(const CollocationConfig& cfg, double lambda, double r_max) {
    const int n = static_cast<int>(
                      std::ceil(std::sqrt(std::max(lambda, 0.0)) * std::sinh(r_max))) +
                  cfg.n_margin;
    return std::clamp(n, cfg.n_min, cfg.n_cap);
}

// Start radius for the radial integration.  The regular branch grows like
// (sinh r / sinh r0)^n, so r0 is tiered upward with n to keep the endpoint
// value inside double range; the two-term series at r0 fixes the branch (any
// admixture of the singular solution decays like (sinh r0 / sinh r)^{2n}).
double radial_start(int n) {
    if (n < 30) return 1e-3;
    if (n < 95) return 1e-2;
    if (n < 130) return 0.05;
    return 0.1;
}

// R_n(r; lambda) sampled at rs: R'' + coth(r) R' + (lambda - n^2/sinh^2 r) R = 0,
// regular branch, normalized by its value near the origin
std::vector<double> radial_values(double lambda, int n, const std::vector<double>& rs,
                                  double r_hi, const ode::Controls& ctl) {
    const double r0 = radial_start(n);
    const double c = -(lambda + static_cast<double>(n) * (n + 1) / 3.0) / (4.0 * (n + 1));
    ode::State<2> y0{1.0 + c * r0 * r0,
                     n > 0 ? (n / r0) * (1.0 + c * r0 * r0) + 2.0 * c * r0 : 2.0 * c * r0};
    auto rhs = [lambda, n](double r, const ode::State<2>& y, ode::State<2>& dy) {
        const double sh = std::sinh(r);
        dy[0] = y[1];
        dy[1] = -std::cosh(r) / sh * y[1] -
                (lambda - static_cast<double>(n) * n / (sh * sh)) * y[0];
    };
    const auto sol = ode::integrate<2>(rhs, y0, r0, r_hi, ctl);
    std::vector<double> out(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        out[i] = rs[i] <= r0 ? y0[0] : sol.at(rs[i])[0];
    return out;
}

}  // namespace

struct OctagonCollocation::Evaluation {
    std::vector<double> sigmas;        // ascending
    std::vector<double> validations;   // fresh-wall residual per raw direction
    std::vector<double> subspace;      // fresh-wall residuals over the span, ascending
    std::vector<double> span_sigmas;   // sampled-wall defect of each span direction
};

OctagonCollocation::OctagonCollocation(CollocationConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.points_per_side < 8 || cfg_.wall_offsets.empty() || cfg_.interior_points < 8 ||
        cfg_.validation_points < 8)
        throw std::invalid_argument("collocation sampling too small to be meaningful");
    if (cfg_.n_cap < cfg_.n_min || cfg_.n_min < 4)
        throw std::invalid_argument("bad angular-order bounds in collocation config");

    const double rho = std::acosh(1.0 + std::sqrt(2.0));       // wall distance
    const double rv = std::acosh(3.0 + 2.0 * std::sqrt(2.0));  // vertex distance

    auto add_point = [&](const HPoint& z) {
        const PseudospherePoint p = halfplane_to_pseudosphere(z);
        rs_.push_back(p.r);
        phis_.push_back(p.phi);
        return static_cast<int>(rs_.size()) - 1;
    };
    // Four wall curves per offset (the other four walls are their partners):
    // side k is the side-0 wall rotated by k pi/4 about the center, and its
    // pairing translation is the conjugated axis translation by 2 rho.
    auto add_walls = [&](double off, int npts, std::vector<Pairing>& out) {
        for (int k = 0; k < 4; ++k) {
            const MoebiusElement rot = rotation_about_i(k * M_PI / 4.0);
            const MoebiusElement wall = rot * axis_translation(-rho + off);
            const MoebiusElement pairing = rot * axis_translation(2.0 * rho) * rot.inverse();
            for (int j = 0; j < npts; ++j) {
                const double s = -rho + 2.0 * rho * j / (npts - 1);
                const HPoint zb = apply_isometry(wall, HPoint(0.0, std::exp(s)));
                const HPoint zi = apply_isometry(pairing, zb);
                Pairing pr;
                pr.base = add_point(zb);
                pr.image = add_point(zi);
                out.push_back(pr);
            }
        }
    };
    for (const double off : cfg_.wall_offsets) add_walls(off, cfg_.points_per_side, pairs_);

    // normalization block: wall values plus scattered interior samples
    norm_rows_.reserve(pairs_.size() + static_cast<std::size_t>(cfg_.interior_points));
    for (const Pairing& p : pairs_) norm_rows_.push_back(p.base);
    SplitMix rng(cfg_.interior_seed);
    for (int j = 0; j < cfg_.interior_points; ++j) {
        rs_.push_back(rng.uniform(0.15, 0.8 * rv));
        phis_.push_back(rng.uniform(-M_PI, M_PI));
        norm_rows_.push_back(static_cast<int>(rs_.size()) - 1);
    }
    stack_pts_ = static_cast<int>(rs_.size());

    add_walls(cfg_.validation_offset, cfg_.validation_points, val_pairs_);
    r_max_ = *std::max_element(rs_.begin(), rs_.end());
}

OctagonCollocation::Evaluation OctagonCollocation::evaluate(double lambda,
                                                            int n_directions) const {
    const int nmax = angular_order(cfg_, lambda, r_max_);
    const int ncols = 2 * nmax + 1;
    const int npts = static_cast<int>(rs_.size());

    ode::Controls ctl;
    ctl.rtol = cfg_.radial_rtol;
    ctl.atol = cfg_.radial_atol;
    std::vector<std::vector<double>> tab(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n)
        tab[static_cast<std::size_t>(n)] =
            radial_values(lambda, n, rs_, r_max_ + 1e-9, ctl);

    // basis values at every sample point; column n is conj(column -n)
    Eigen::MatrixXcd M(npts, ncols);
    for (int p = 0; p < npts; ++p) {
        const std::complex<double> e1 = std::polar(1.0, phis_[static_cast<std::size_t>(p)]);
        std::complex<double> e = 1.0;
        for (int n = 0; n <= nmax; ++n) {
            const std::complex<double> v = tab[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)] * e;
            M(p, nmax + n) = v;
            M(p, nmax - n) = std::conj(v);
            e *= e1;
        }
    }
    // column scaling (any positive scaling leaves the Q_A singular values
    // unchanged; this one keeps the QR well conditioned)
    for (int c = 0; c < ncols; ++c) {
        double sc = 0.0;
        for (int p = 0; p < stack_pts_; ++p) sc = std::max(sc, std::abs(M(p, c)));
        if (!(sc > 0.0) || !std::isfinite(sc))
            throw NumericalError("degenerate radial basis column at lambda = " +
                                 format_double(lambda));
        M.col(c) /= sc;
    }

    const int nA = static_cast<int>(pairs_.size());
    const int nB = static_cast<int>(norm_rows_.size());
    Eigen::MatrixXcd S(nA + nB, ncols);
    for (int j = 0; j < nA; ++j)
        S.row(j) = M.row(pairs_[static_cast<std::size_t>(j)].base) -
                   M.row(pairs_[static_cast<std::size_t>(j)].image);
    for (int j = 0; j < nB; ++j) S.row(nA + j) = M.row(norm_rows_[static_cast<std::size_t>(j)]);

    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(S);
    const Eigen::MatrixXcd Q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(nA + nB, ncols);
    const Eigen::MatrixXcd QA = Q.topRows(nA);

    // singular values of Q_A via its Gram matrix (ascending); adequate down
    // to sigma ~ 1e-8, far below every dip floor that matters here
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(QA.adjoint() * QA);
    if (eig.info() != Eigen::Success)
        throw NumericalError("spectral factorization failed in collocation at lambda = " +
                             format_double(lambda));
    Evaluation ev;
    ev.sigmas.resize(static_cast<std::size_t>(ncols));
    for (int j = 0; j < ncols; ++j)
        ev.sigmas[static_cast<std::size_t>(j)] =
            std::sqrt(std::max(eig.eigenvalues()[j], 0.0));

    if (n_directions > 0) {
        const int nd = std::min(n_directions, ncols);
        const Eigen::MatrixXcd Rtop = qr.matrixQR().topRows(ncols);
        const int nV = static_cast<int>(val_pairs_.size());
        Eigen::MatrixXcd Av(nV, ncols), Cv(nV, ncols);
        for (int j = 0; j < nV; ++j) {
            Av.row(j) = M.row(val_pairs_[static_cast<std::size_t>(j)].base) -
                        M.row(val_pairs_[static_cast<std::size_t>(j)].image);
            Cv.row(j) = M.row(val_pairs_[static_cast<std::size_t>(j)].base);
        }
        // coefficients of the nd smallest directions in the scaled basis
        Eigen::MatrixXcd X(ncols, nd);
        for (int j = 0; j < nd; ++j)
            X.col(j) = Rtop.triangularView<Eigen::Upper>().solve(
                Eigen::VectorXcd(eig.eigenvectors().col(j)));
        const Eigen::MatrixXcd AX = Av * X;  // fresh-wall pairing defects
        const Eigen::MatrixXcd CX = Cv * X;  // fresh-wall values
        ev.validations.reserve(static_cast<std::size_t>(nd));
        for (int j = 0; j < nd; ++j) {
            double val = AX.col(j).norm() / CX.col(j).norm();
            if (!std::isfinite(val)) val = std::numeric_limits<double>::infinity();
            ev.validations.push_back(val);
        }
        // Residuals over the whole span: generalized eigenvalues of the pencil
        // (AX^H AX, CX^H CX).  Whiten against the value Gram with a relative
        // cutoff so combinations invisible on the fresh walls drop out instead
        // of polluting the small end of the spectrum.
        const Eigen::MatrixXcd G = AX.adjoint() * AX;
        const Eigen::MatrixXcd H = CX.adjoint() * CX;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(H);
        if (eh.info() != Eigen::Success)
            throw NumericalError("validation Gram factorization failed at lambda = " +
                                 format_double(lambda));
        const double hmax = eh.eigenvalues().maxCoeff();
        std::vector<int> vis;
        for (int j = 0; j < nd; ++j)
            if (eh.eigenvalues()[j] > 1e-10 * hmax) vis.push_back(j);
        if (!vis.empty()) {
            Eigen::MatrixXcd T(nd, static_cast<int>(vis.size()));
            for (std::size_t k = 0; k < vis.size(); ++k)
                T.col(static_cast<long>(k)) = eh.eigenvectors().col(vis[k]) /
                                              std::sqrt(eh.eigenvalues()[vis[k]]);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(T.adjoint() * G * T);
            if (em.info() != Eigen::Success)
                throw NumericalError("subspace validation failed at lambda = " +
                                     format_double(lambda));
            const long ng = em.eigenvalues().size();
            ev.subspace.resize(static_cast<std::size_t>(ng));
            ev.span_sigmas.resize(static_cast<std::size_t>(ng));
            for (long j = 0; j < ng; ++j) {
                ev.subspace[static_cast<std::size_t>(j)] =
                    std::sqrt(std::max(em.eigenvalues()[j], 0.0));
                // back to raw-direction coordinates, where the sampled Gram is
                // diagonal with entries sigma_j^2
                const Eigen::VectorXcd w = T * em.eigenvectors().col(j);
                double num = 0.0, den = 0.0;
                for (int i = 0; i < nd; ++i) {
                    const double wi = std::norm(w[i]);
                    num += ev.sigmas[static_cast<std::size_t>(i)] *
                           ev.sigmas[static_cast<std::size_t>(i)] * wi;
                    den += wi;
                }
                ev.span_sigmas[static_cast<std::size_t>(j)] =
                    den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
            }
        }
    }
    return ev;
}

double OctagonCollocation::detect_stat(double lambda) const {
    if (cfg_.span_detect) {
        const Evaluation ev = evaluate(lambda, 4);
        return ev.subspace.empty() ? std::numeric_limits<double>::infinity()
                                   : ev.subspace.front();
    }
    const Evaluation ev = evaluate(lambda, 0);
    return std::sqrt(ev.sigmas[0] * ev.sigmas[1]);
}

SigmaProbe OctagonCollocation::probe(double lambda, int count) const {
    if (count < 1) throw std::invalid_argument("probe needs count >= 1");
    const Evaluation ev = evaluate(lambda, count);
    SigmaProbe out;
    out.lambda = lambda;
    const std::size_t nd = std::min(static_cast<std::size_t>(count), ev.sigmas.size());
    out.sigmas.assign(ev.sigmas.begin(), ev.sigmas.begin() + static_cast<long>(nd));
    out.validations = ev.validations;
    out.subspace = ev.subspace;
    out.span_sigmas = ev.span_sigmas;
    return out;
}

std::vector<EigenvalueHit> OctagonCollocation::find_eigenvalues(
    double lo, double hi, double step, std::vector<RejectedDip>* rejected) const {
    if (!(step > 0.0) || !(hi > lo))
        throw std::invalid_argument("bad collocation scan range");
    const int threads = hardware_threads(cfg_.threads);
    const int m = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
    if (m < 3) throw std::invalid_argument("collocation scan needs at least three grid points");

    std::vector<double> d(static_cast<std::size_t>(m));
    parallel_for(m, threads,
                 [&](int i) { d[static_cast<std::size_t>(i)] = detect_stat(lo + i * step); });

    // prominent local minima of the detection statistic
    const int w = std::max(1, static_cast<int>(std::lround(cfg_.ridge_window / step)));
    std::vector<int> cand;
    for (int i = 1; i + 1 < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (!(d[ui] <= d[ui - 1] && d[ui] <= d[ui + 1])) continue;
        double lr = 0.0, rr = 0.0;
        for (int k = std::max(0, i - w); k <= i; ++k)
            lr = std::max(lr, d[static_cast<std::size_t>(k)]);
        for (int k = i; k <= std::min(m - 1, i + w); ++k)
            rr = std::max(rr, d[static_cast<std::size_t>(k)]);
        if (std::min(lr, rr) < cfg_.min_prominence * d[ui]) continue;
        if (!cand.empty() && i - cand.back() <= 2) {  // plateau duplicate
            if (d[ui] < d[static_cast<std::size_t>(cand.back())]) cand.back() = i;
            continue;
        }
        cand.push_back(i);
    }

    std::vector<EigenvalueHit> hits(cand.size());
    std::vector<RejectedDip> drops(cand.size());
    std::vector<char> keep(cand.size(), 0);
    parallel_for(static_cast<int>(cand.size()), threads, [&](int ci) {
        // golden-section the dip, then polish the vertex by intersecting the
        // two arms of the V sampled above its accuracy floor
        double a = lo + (cand[static_cast<std::size_t>(ci)] - 1) * step;
        double b = lo + (cand[static_cast<std::size_t>(ci)] + 1) * step;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = detect_stat(x1), f2 = detect_stat(x2);
        while (b - a > 2e-4) {
            if (f1 <= f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - gr * (b - a); f1 = detect_stat(x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + gr * (b - a); f2 = detect_stat(x2);
            }
        }
        const double vtx0 = 0.5 * (a + b);
        const int nd0 = 10;
        auto front_span = [&](double lam) {
            const Evaluation e = evaluate(lam, nd0);
            return e.subspace.empty() ? std::numeric_limits<double>::infinity()
                                      : e.subspace.front();
        };
        auto count_genuine = [&](const Evaluation& e) {
            int mult = 0;
            for (std::size_t j = 0; j < e.subspace.size(); ++j)
                if (e.subspace[j] <= cfg_.validation_genuine &&
                    e.span_sigmas[j] <= cfg_.sampled_genuine)
                    ++mult;
            return mult;
        };
        // Polish the vertex on the span residuals.  The detection statistic
        // contains the lambda-flat overfit floor as a factor, which displaces
        // its minimum by up to ~1e-3; the span residuals hinge sharply at the
        // eigenvalue and ignore the overfit directions.  Tracking the m-th
        // smallest (m = rough count of in-cluster directions) lands where the
        // whole eigenspace bottoms out, not just its best-behaved member.
        auto attempt = [&](double start) {
            double vtx = start;
            int m_loose = 0;
            for (const double s : evaluate(vtx, nd0).subspace)
                if (s <= 1e-3) ++m_loose;
            m_loose = std::max(m_loose, 1);
            auto span_stat = [&](double lam) {
                const Evaluation e = evaluate(lam, nd0);
                return static_cast<int>(e.subspace.size()) < m_loose
                           ? std::numeric_limits<double>::infinity()
                           : e.subspace[static_cast<std::size_t>(m_loose - 1)];
            };
            for (const double h1 : {2.5e-3, 5e-4}) {
                const double h2 = 2.0 * h1;
                const double dl1 = span_stat(vtx - h1), dl2 = span_stat(vtx - h2);
                const double dr1 = span_stat(vtx + h1), dr2 = span_stat(vtx + h2);
                const double sl = (dl2 - dl1) / (h2 - h1);  // left-arm slope in |dlambda|
                const double sr = (dr2 - dr1) / (h2 - h1);
                if (!std::isfinite(sl) || !std::isfinite(sr) || sl <= 0.0 || sr <= 0.0)
                    break;
                const double shift = (dl1 - dr1 + (sr - sl) * h1) / (sl + sr);
                if (std::abs(shift) >= h2) break;
                vtx += shift;
            }
            int nd = nd0;
            Evaluation ev = evaluate(vtx, nd);
            int mult = count_genuine(ev);
            if (mult == nd) {  // unusually rich cluster; widen once
                nd = 16;
                ev = evaluate(vtx, nd);
                mult = count_genuine(ev);
            }
            return std::tuple<double, Evaluation, int>(vtx, std::move(ev), mult);
        };
        auto [vtx, ev, mult] = attempt(vtx0);
        if (mult == 0) {
            // The detection statistic can bottom out on an overfit zero inside
            // the same grid cell as a real level, hiding the level's own dip.
            // When a probe smells a level nearby, sweep the span residual and
            // try again at its minimum.
            double pre = std::min(ev.subspace.empty()
                                      ? std::numeric_limits<double>::infinity()
                                      : ev.subspace.front(),
                                  std::min(std::min(front_span(vtx0 - 0.01), front_span(vtx0 + 0.01)),
                                           std::min(front_span(vtx0 - 0.02), front_span(vtx0 + 0.02))));
            if (pre <= 1e-3) {
                double best_x = vtx0, best_s = std::numeric_limits<double>::infinity();
                for (int k = -10; k <= 10; ++k) {
                    if (k == 0) continue;
                    const double x = vtx0 + 2e-3 * k;
                    const double s = front_span(x);
                    if (s < best_s) {
                        best_s = s;
                        best_x = x;
                    }
                }
                if (best_s <= 1e-3) {
                    auto [vtx2, ev2, mult2] = attempt(best_x);
                    if (mult2 > 0) {
                        vtx = vtx2;
                        ev = std::move(ev2);
                        mult = mult2;
                    }
                }
            }
        }
        if (mult == 0) {  // overfit dip: nothing survives the fresh walls
            drops[static_cast<std::size_t>(ci)] = RejectedDip{
                vtx, ev.subspace.empty() ? std::numeric_limits<double>::infinity()
                                         : ev.subspace.front()};
            keep[static_cast<std::size_t>(ci)] = 2;
            return;
        }
        EigenvalueHit h;
        h.lambda = vtx;
        h.multiplicity = mult;
        for (std::size_t j = 0; j < ev.subspace.size(); ++j)
            if (ev.subspace[j] <= cfg_.validation_genuine &&
                ev.span_sigmas[j] <= cfg_.sampled_genuine) {
                h.sigma = std::max(h.sigma, ev.span_sigmas[j]);
                h.validation = std::max(h.validation, ev.subspace[j]);
            }
        h.detect = std::sqrt(ev.sigmas[0] * ev.sigmas[1]);
        hits[static_cast<std::size_t>(ci)] = h;
        keep[static_cast<std::size_t>(ci)] = 1;
    });

    std::vector<EigenvalueHit> out;
    for (std::size_t ci = 0; ci < hits.size(); ++ci) {
        if (keep[ci] == 1) {
            out.push_back(hits[ci]);
        } else if (keep[ci] == 2 && rejected) {
            rejected->push_back(drops[ci]);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const EigenvalueHit& p, const EigenvalueHit& q) { return p.lambda < q.lambda; });
    std::vector<EigenvalueHit> merged;
    for (const EigenvalueHit& h : out) {
        if (!merged.empty() && h.lambda - merged.back().lambda < 2.5e-4) {
            if (h.detect < merged.back().detect) merged.back() = h;
        } else {
            merged.push_back(h);
        }
    }
    return merged;
}

CollocationConfig coarse_collocation_config() {
    CollocationConfig cfg;
    cfg.points_per_side = 24;
    cfg.interior_points = 48;
    cfg.n_min = 36;
    cfg.n_cap = 60;
    cfg.radial_rtol = 1e-8;
    cfg.radial_atol = 1e-11;
    cfg.validation_points = 40;
    // the coarser basis leaves larger residuals on genuine directions
    cfg.validation_genuine = 4e-3;
    cfg.sampled_genuine = 4e-3;
    return cfg;
}

}  // namespace magtrace
