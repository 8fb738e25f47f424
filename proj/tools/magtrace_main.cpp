#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magtrace/flow.hpp"
#include "magtrace/fuchsian.hpp"
#include "magtrace/geometry.hpp"
#include "magtrace/report.hpp"
#include "magtrace/spectrum.hpp"
#include "magtrace/testfn.hpp"
#include "magtrace/traceformula.hpp"
#include "magtrace/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitNumerical = 4;

std::string data_dir() {
    if (const char* env = std::getenv("MAGTRACE_DATA_DIR")) return env;
#ifdef MAGTRACE_DATA_DIR
    return MAGTRACE_DATA_DIR;
#else
    return "data";
#endif
}

magtrace::GroupPresentation resolve_group(const std::string& spec) {
    if (spec == "bolza") return magtrace::bolza_group();
    return magtrace::load_group(spec);
}

// test-function spec: gaussian:<sigma> | bump:<center>,<half_width>
magtrace::TestFunctionPair parse_phi(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "gaussian") {
        const double sigma = args.empty() ? 1.0 : std::stod(args);
        return magtrace::gaussian_pair(sigma);
    }
    if (kind == "bump") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("bump spec needs bump:<center>,<half_width>");
        return magtrace::bump_hat_pair(std::stod(args.substr(0, comma)),
                                       std::stod(args.substr(comma + 1)));
    }
    throw std::invalid_argument("unknown test-function kind '" + kind +
                                "' (expected gaussian:<sigma> or bump:<c>,<hw>)");
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        magtrace::write_text_file(path, content);
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    double E = 1.2, B = 1.0, x = 0.0, y = 1.0, theta = 0.0, T = 50.0, tol = 1e-10;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    const magtrace::FlowParams params(a.E, a.B);
    const auto cls = magtrace::classify_regime(params.E0, a.B);
    if (cls.near_critical)
        std::cerr << "warning: kinetic level within 1e-8 of the critical ratio "
                     "B^2/E0 = 1; trajectory type is borderline "
                  << magtrace::regime_name(cls.regime) << "\n";
    magtrace::Trajectory tr =
        magtrace::integrate_flow(magtrace::PhaseState(a.x, a.y, a.theta), params, a.T, a.tol);
    const auto cons = magtrace::conserved_quantities(tr);
    emit(a.out, magtrace::render_trajectory_csv(tr));
    std::cerr << "regime " << magtrace::regime_name(cls.regime) << ", steps "
              << tr.n_accepted << " (+" << tr.n_rejected << " rejected), energy drift "
              << magtrace::format_double(cons.energy_drift) << ", curvature drift "
              << magtrace::format_double(cons.c_drift) << "\n";
    return kExitOk;
}

// ---- classes ---------------------------------------------------------------

struct ClassesArgs {
    std::string group = "bolza";
    double max_norm = 0.0, max_length = 0.0;
    int max_word_length = 16;
    bool require_exhaustive = false;
    std::string out;
};

int cmd_classes(const ClassesArgs& a) {
    if (a.max_norm <= 0.0 && a.max_length <= 0.0)
        throw CLI::ValidationError("classes", "one of --max-norm/--max-length is required");
    const double cutoff = a.max_norm > 0.0 ? a.max_norm : std::exp(a.max_length);
    const auto G = resolve_group(a.group);
    const auto list = magtrace::enumerate_classes(G, cutoff, a.max_word_length);
    std::ostringstream os;
    magtrace::write_classes_csv(list, os);
    emit(a.out, os.str());
    std::cerr << "classes " << list.classes.size() << ", exhaustive "
              << (list.exhaustive ? "yes" : "no") << " up to norm "
              << magtrace::format_double(list.norm_bound) << "\n";
    if (a.require_exhaustive && !list.exhaustive) {
        std::cerr << "error: enumeration certificate incomplete: " << list.note << "\n";
        return kExitCertificate;
    }
    return kExitOk;
}

// ---- spectrum --------------------------------------------------------------

struct SpectrumArgs {
    int N = 10, g = 2;
    std::string laplace;
    std::string out;
};

int cmd_spectrum(const SpectrumArgs& a) {
    std::string csv = "nu,multiplicity,origin,index\n";
    for (const auto& d : magtrace::interior_eigenvalues(a.N, a.g))
        csv += magtrace::format_double(d.nu) + "," + std::to_string(d.multiplicity) +
               ",interior," + std::to_string(d.index) + "\n";
    if (!a.laplace.empty()) {
        const auto L = magtrace::load_laplace_spectrum(a.laplace);
        if (L.genus() != a.g)
            throw std::invalid_argument("laplace file genus " + std::to_string(L.genus()) +
                                        " disagrees with --genus " + std::to_string(a.g));
        for (const auto& d : magtrace::continuous_eigenvalues(L, a.N))
            csv += magtrace::format_double(d.nu) + "," + std::to_string(d.multiplicity) +
                   ",continuous," + std::to_string(d.index) + "\n";
    }
    emit(a.out, csv);
    return kExitOk;
}

// ---- trace -----------------------------------------------------------------

struct TraceArgs {
    double E = 1.2;
    int N_min = 20, N_max = 200, N_step = 10;
    int g = 2;
    std::string laplace;
    std::string group = "bolza";
    std::string phi_spec = "gaussian:1.0";
    int k_max = 64;
    double tail_tol = 1e-8;
    bool coefficients_only = false;
    bool use_alt_subcritical = false;
    unsigned long long seed = 0;
    std::string out, plot;
};

int cmd_trace(const TraceArgs& a) {
    magtrace::assert_weyl_convention();
    const auto reg = magtrace::EnergyRegime::classify(a.E);
    if (reg.near_critical)
        std::cerr << "warning: E within 1e-8 of the critical level sqrt(2); "
                     "treating as "
                  << magtrace::regime_label(reg.regime) << "\n";
    const auto phi = parse_phi(a.phi_spec);

    std::optional<magtrace::LaplaceSpectrum> L;
    if (!a.laplace.empty()) L = magtrace::load_laplace_spectrum(a.laplace);
    if (L && L->genus() != a.g)
        throw std::invalid_argument("laplace file genus disagrees with --genus");

    const bool needs_spectrum = !a.coefficients_only;
    if (needs_spectrum && reg.regime != magtrace::Regime::Subcritical && !L)
        throw std::invalid_argument(
            "computing Y_N at E >= sqrt(2) needs the continuous series: pass "
            "--laplace <file> or --coefficients-only");

    std::vector<int> Ns;
    for (int N = a.N_min; N <= a.N_max; N += a.N_step) Ns.push_back(N);
    if (Ns.empty()) throw std::invalid_argument("empty N range");

    // coefficient provider per regime
    std::optional<magtrace::ClassList> classes;
    auto coeffs_at = [&](int N) -> magtrace::CoefficientReport {
        switch (reg.regime) {
            case magtrace::Regime::Subcritical:
                return a.use_alt_subcritical
                           ? magtrace::coefficients_subcritical_alt(N, a.E, a.g, phi,
                                                                    a.k_max)
                           : magtrace::coefficients_subcritical(N, a.E, a.g, phi, a.k_max);
            case magtrace::Regime::Critical:
                return magtrace::coefficients_critical(a.g, phi);
            case magtrace::Regime::Supercritical: {
                if (!classes) {
                    double hull = 0.0;
                    if (phi.support_hat)
                        hull = std::max(std::fabs((*phi.support_hat)[0]),
                                        std::fabs((*phi.support_hat)[1]));
                    else
                        throw std::invalid_argument(
                            "supercritical orbit sums need a compactly supported "
                            "phi_hat (use bump:<c>,<hw>)");
                    const double root = std::sqrt(a.E * a.E - 2.0);
                    const double need = std::exp(hull * root / a.E) * 1.0001;
                    classes = magtrace::enumerate_classes(resolve_group(a.group), need);
                }
                auto rep = magtrace::c1_supercritical(N, a.E, *classes, phi);
                rep.c0 = magtrace::weyl_term(a.E, a.g, 1.0) * phi.phi_hat(0.0);
                return rep;
            }
        }
        throw std::logic_error("unreachable");
    };

    magtrace::TraceRunReport report;
    report.E = a.E;
    report.regime = magtrace::regime_label(reg.regime);
    report.g = a.g;
    report.phi_kind = phi.kind;
    report.surface_id = L ? L->surface_id : (a.coefficients_only ? "" : "(interior only)");
    report.seed = a.seed;

    std::vector<std::string> failures;
    const auto interior_cache = [&] {
        std::map<int, std::vector<magtrace::SpectralDatum>> m;
        return m;
    }();
    (void)interior_cache;

    std::map<int, double> Y_by_N;
    for (int N : Ns) {
        magtrace::CoefficientReport cr;
        try {
            cr = coeffs_at(N);
        } catch (const magtrace::CertificateError&) {
            throw;  // completeness problems abort the whole run
        }
        double Y = 0.0;
        if (needs_spectrum) {
            try {
                const auto interior = magtrace::interior_eigenvalues(N, a.g);
                const std::vector<magtrace::SpectralDatum> cont =
                    L ? magtrace::continuous_eigenvalues(*L, N)
                      : std::vector<magtrace::SpectralDatum>{};
                Y = magtrace::Y_N_exact(interior, cont, a.E, N, phi, a.tail_tol);
            } catch (const magtrace::NumericalError& e) {
                failures.push_back("N=" + std::to_string(N) + ": " + e.what());
                continue;
            }
            Y_by_N[N] = Y;
        }
        report.Ns.push_back(N);
        if (needs_spectrum) report.Y.push_back(Y);
        report.c0.push_back(cr.c0);
        report.c1.push_back(cr.c1);
        report.last_coefficients = std::move(cr);
    }

    if (needs_spectrum && report.Ns.size() >= 4) {
        report.fit = magtrace::residual_analysis(
            [&](int N) { return Y_by_N.at(N); },
            [&](int N) { return coeffs_at(N).c0; }, [&](int N) { return coeffs_at(N).c1; },
            report.Ns);
        report.have_fit = true;
    }

    emit(a.out, magtrace::render_trace_json(report));
    if (!a.plot.empty() && needs_spectrum)
        magtrace::write_text_file(a.plot, magtrace::render_plot_csv(report));

    if (!failures.empty()) {
        std::cerr << "spectrum window failures:\n";
        for (const auto& f : failures) std::cerr << "  " << f << "\n";
        return kExitCertificate;
    }
    return kExitOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    unsigned long long seed = 0;
    std::string laplace;
};

int cmd_verify(const VerifyArgs& a) {
    using namespace magtrace;
    int failed = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS " : "FAIL ") << name
                  << (detail.empty() ? "" : ": " + detail) << "\n";
        if (!ok) ++failed;
    };

    assert_weyl_convention();
    check("fourier/weyl convention lock", true);

    // flow conservation on seeded random states across the three regimes
    SplitMix rng(a.seed);
    double worst_energy = 0.0, worst_c = 0.0;
    for (double E : {1.2, 1.4142135623730951, 2.0}) {
        for (int i = 0; i < 5; ++i) {
            const PhaseState s0(rng.uniform(-1, 1), std::exp(rng.uniform(-0.5, 0.5)),
                                rng.uniform(-3, 3));
            const FlowParams p(E, 1.0);
            const auto tr = integrate_flow(s0, p, 30.0, 1e-10);
            const auto c = conserved_quantities(tr);
            worst_energy = std::max(worst_energy, c.energy_drift);
            worst_c = std::max(worst_c, c.c_drift);
        }
    }
    check("flow conservation (15 seeded trajectories)", worst_energy < 1e-8 && worst_c < 1e-7,
          "energy " + format_double(worst_energy) + ", curvature " + format_double(worst_c));

    // group relation and enumeration certificate on the built-in surface
    const auto G = bolza_group();
    check("surface-group relation residual", G.relation_residual() < 1e-12,
          format_double(G.relation_residual()));
    const auto classes = enumerate_classes(G, 60.0);
    check("class enumeration certificate", classes.exhaustive, classes.note);
    const double systole = classes.classes.empty() ? 0.0 : classes.classes.front().length;
    check("systole length", std::fabs(systole - 2.0 * std::acosh(1.0 + std::sqrt(2.0))) < 1e-9,
          format_double(systole));

    // reduction identity on seeded samples
    double worst_red = 0.0;
    const auto phi = gaussian_pair(1.0);
    for (int i = 0; i < 2000; ++i) {
        const double lam = rng.uniform(0.0, 200.0);
        const int N = 1 + static_cast<int>(rng.uniform(0.0, 120.0));
        const double E = 1.5 + rng.uniform(0.0, 1.0);
        const auto [E0r, psi] = reduction_map(E, phi);
        const double lhs = phi(std::sqrt(lam + 2.0 * N * N) - E * N).real();
        const double rhs = psi(std::sqrt(lam / 2.0 + N * N) - E0r * N).real();
        worst_red = std::max(worst_red, std::fabs(lhs - rhs));
    }
    check("reduction identity (2000 seeded samples)", worst_red < 1e-12,
          format_double(worst_red));

    // ladder-identity finite differences at O(h^2)
    double worst_ratio_lo = 10.0, worst_ratio_hi = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double x = rng.uniform(-1, 1), y = std::exp(rng.uniform(-0.3, 0.8));
        const double ax = rng.uniform(0.5, 2.0), ay = rng.uniform(0.5, 2.0);
        auto u = [ax, ay](double X, double Y) {
            return std::complex<double>(std::sin(ax * X) * std::cosh(0.3 * Y),
                                        std::cos(ay * Y) + 0.2 * X * Y);
        };
        const double r1 = maass_identity_residual(3, u, x, y, 2e-3);
        const double r2 = maass_identity_residual(3, u, x, y, 1e-3);
        if (r2 > 1e-14) {
            const double ratio = r1 / r2;
            worst_ratio_lo = std::min(worst_ratio_lo, ratio);
            worst_ratio_hi = std::max(worst_ratio_hi, ratio);
        }
    }
    check("ladder identity O(h^2) order",
          worst_ratio_lo > 3.5 && worst_ratio_hi < 4.5,
          "h-halving ratios in [" + format_double(worst_ratio_lo) + ", " +
              format_double(worst_ratio_hi) + "]");

    // ingested spectrum, when present
    const std::string lap =
        a.laplace.empty() ? data_dir() + "/bolza_laplace.dat" : a.laplace;
    std::ifstream probe(lap);
    if (probe) {
        const auto L = load_laplace_spectrum(lap);
        check("laplace spectrum ingestion (" + L.surface_id + ")", true,
              std::to_string(L.lambdas.size()) + " levels to " +
                  format_double(L.lambda_max));
    } else {
        std::cout << "SKIP laplace spectrum ingestion (no file at " << lap << ")\n";
    }

    std::cout << (failed == 0 ? "verify: all checks passed\n"
                              : "verify: " + std::to_string(failed) + " check(s) failed\n");
    return failed == 0 ? kExitOk : kExitCertificate;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "magtrace: magnetic-flow trace-formula laboratory for compact "
        "hyperbolic surfaces"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file (dotted keys reach "
                                   "subcommand options, e.g. trace.E=1.2)");
    int threads = 0;
    app.add_option("--threads", threads, "worker-thread cap (0 = default)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "integrate one magnetic trajectory");
    sim->add_option("--E", sa.E, "energy parameter > 1")->required();
    sim->add_option("--B", sa.B, "field strength")->capture_default_str();
    sim->add_option("--x", sa.x, "initial x")->capture_default_str();
    sim->add_option("--y", sa.y, "initial y > 0")->capture_default_str();
    sim->add_option("--theta", sa.theta, "initial direction")->capture_default_str();
    sim->add_option("--T", sa.T, "integration time")->capture_default_str();
    sim->add_option("--tol", sa.tol, "integrator tolerance")->capture_default_str();
    sim->add_option("--out", sa.out, "trajectory CSV path (default stdout)");

    ClassesArgs ca;
    auto* cls = app.add_subcommand("classes", "enumerate primitive conjugacy classes");
    cls->add_option("--group", ca.group, "group file or 'bolza'")->capture_default_str();
    cls->add_option("--max-norm", ca.max_norm, "norm cutoff");
    cls->add_option("--max-length", ca.max_length, "geodesic length cutoff");
    cls->add_option("--max-word-len", ca.max_word_length, "word-length cap")
        ->capture_default_str();
    cls->add_flag("--require-exhaustive", ca.require_exhaustive,
                  "exit 3 unless the certificate is complete");
    cls->add_option("--out", ca.out, "CSV path (default stdout)");

    SpectrumArgs pa;
    auto* spc = app.add_subcommand("spectrum", "emit interior/continuous spectral data");
    spc->add_option("--N", pa.N, "field strength (positive integer)")->required();
    spc->add_option("--genus", pa.g, "surface genus")->capture_default_str();
    spc->add_option("--laplace", pa.laplace, "base Laplace spectrum file");
    spc->add_option("--out", pa.out, "CSV path (default stdout)");

    TraceArgs ta;
    auto* trc = app.add_subcommand("trace", "spectral sums vs expansion coefficients");
    trc->add_option("--E", ta.E, "energy parameter > 1")->required();
    trc->add_option("--N-min", ta.N_min, "first N")->capture_default_str();
    trc->add_option("--N-max", ta.N_max, "last N")->capture_default_str();
    trc->add_option("--N-step", ta.N_step, "N stride")->capture_default_str();
    trc->add_option("--genus", ta.g, "surface genus")->capture_default_str();
    trc->add_option("--laplace", ta.laplace, "base Laplace spectrum file");
    trc->add_option("--group", ta.group, "group file or 'bolza' (supercritical)")
        ->capture_default_str();
    trc->add_option("--phi", ta.phi_spec, "gaussian:<sigma> or bump:<c>,<hw>")
        ->capture_default_str();
    trc->add_option("--k-max", ta.k_max, "oscillatory-sum truncation")
        ->capture_default_str();
    trc->add_option("--tail-tol", ta.tail_tol, "certified-tail tolerance for Y_N")
        ->capture_default_str();
    trc->add_flag("--coefficients-only", ta.coefficients_only,
                  "skip Y_N (no spectrum needed)");
    trc->add_flag("--alt-subcritical", ta.use_alt_subcritical,
                  "use the alternative subcritical c1 display");
    trc->add_option("--seed", ta.seed, "recorded in the report")->capture_default_str();
    trc->add_option("--out", ta.out, "JSON report path (default stdout)");
    trc->add_option("--plot", ta.plot, "plot CSV path");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    ver->add_option("--seed", va.seed, "seed for randomized checks")->capture_default_str();
    ver->add_option("--laplace", va.laplace, "spectrum file to ingest-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sa);
        if (cls->parsed()) return cmd_classes(ca);
        if (spc->parsed()) return cmd_spectrum(pa);
        if (trc->parsed()) return cmd_trace(ta);
        if (ver->parsed()) return cmd_verify(va);
    } catch (const magtrace::CertificateError& e) {
        std::cerr << "error (completeness): " << e.what() << "\n";
        return kExitCertificate;
    } catch (const magtrace::NumericalError& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error (usage): " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
