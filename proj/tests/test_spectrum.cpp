#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "magtrace/collocation.hpp"
#include "magtrace/spectrum.hpp"
#include "magtrace/util.hpp"

using namespace magtrace;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
    std::ofstream os(name);
    os << content;
    return name;
}

// message of the exception thrown by fn, or "" if it does not throw
template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("interior family closed forms") {
    // nu_k = (2k+1)N - k(k+1), multiplicity (g-1)(2N-2k-1), k = 0..N-1
    const int N = 5;
    const auto data = interior_eigenvalues(N, 2);
    REQUIRE(data.size() == 5);

    CHECK(data.front().nu == doctest::Approx(N));          // k = 0: nu = N
    CHECK(data.front().multiplicity == 2 * N - 1);         // 9
    CHECK(data.back().nu == doctest::Approx(N * N));       // k = N-1: nu = N^2
    CHECK(data.back().multiplicity == 1);

    long long total = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& d = data[i];
        CHECK(d.origin == SpectralOrigin::Interior);
        CHECK(d.index == static_cast<int>(i));
        const double k = d.index;
        CHECK(d.nu == doctest::Approx((2 * k + 1) * N - k * (k + 1)));
        CHECK(d.nu >= N);
        CHECK(d.nu <= N * N);
        if (i > 0) CHECK(d.nu > data[i - 1].nu);  // strictly ascending in k
        total += d.multiplicity;
    }
    CHECK(total == static_cast<long long>(N) * N);  // (g-1) N^2

    // genus enters only through the multiplicity factor g-1
    const auto data3 = interior_eigenvalues(N, 3);
    for (std::size_t i = 0; i < data3.size(); ++i) {
        CHECK(data3[i].nu == doctest::Approx(data[i].nu));
        CHECK(data3[i].multiplicity == 2 * data[i].multiplicity);
    }

    CHECK_THROWS_AS(interior_eigenvalues(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(interior_eigenvalues(5, 1), std::invalid_argument);
}

TEST_CASE("scaled eigenvalue variable") {
    CHECK(lambda_scaled(0.0, 7) == doctest::Approx(7.0));  // sqrt(0 + N^2)
    CHECK(lambda_scaled(11.0, 3) == doctest::Approx(std::sqrt(20.0)));
    CHECK(lambda_scaled(25.0, 5) == doctest::Approx(std::sqrt(50.0)));
    CHECK_THROWS_AS(lambda_scaled(-1.0, 3), std::invalid_argument);
}

TEST_CASE("continuous family carries the base spectrum") {
    LaplaceSpectrum L;
    L.surface_id = "synthetic";
    L.area = 4.0 * M_PI;
    L.lambda_max = 9.0;
    L.lambdas = {{0.0, 1}, {3.5, 3}, {9.0, 2}};

    const int N = 4;
    const auto cont = continuous_eigenvalues(L, N);
    REQUIRE(cont.size() == 3);
    for (std::size_t l = 0; l < cont.size(); ++l) {
        CHECK(cont[l].nu == doctest::Approx(L.lambdas[l].first + N * N));
        CHECK(cont[l].multiplicity == L.lambdas[l].second);
        CHECK(cont[l].origin == SpectralOrigin::Continuous);
        CHECK(cont[l].index == static_cast<int>(l));
    }

    CHECK(L.genus() == 2);
    CHECK(L.count_upto(3.5) == 4);
    CHECK(L.count_upto(100.0) == 6);
    CHECK(L.count_upto(-1.0) == 0);

    LaplaceSpectrum L3 = L;
    L3.area = 8.0 * M_PI;
    CHECK(L3.genus() == 3);
    LaplaceSpectrum bad = L;
    bad.area = 10.0;  // not 4*pi*(g-1)
    CHECK_THROWS_AS(bad.genus(), std::runtime_error);
}

TEST_CASE("spectrum file parsing and validation") {
    SUBCASE("well-formed file") {
        const auto path = write_tmp("spec_ok.dat",
                                    "# comment line\n"
                                    "# provenance: synthetic fixture\n"
                                    "surface demo\n"
                                    "area 12.566370614359172\n"  // 4 pi
                                    "0 1\n"
                                    "3.8388872588 3  # trailing comment\n");
        const auto L = load_laplace_spectrum(path);
        CHECK(L.surface_id == "demo");
        CHECK(L.genus() == 2);
        CHECK(L.lambda_max == doctest::Approx(3.8388872588));
        REQUIRE(L.lambdas.size() == 2);
        CHECK(L.lambdas[1].second == 3);
        CHECK(L.provenance.find("synthetic fixture") != std::string::npos);
        std::remove(path.c_str());
    }

    SUBCASE("missing zero mode") {
        const auto path = write_tmp("spec_nozero.dat",
                                    "surface demo\narea 12.566370614359172\n"
                                    "3.84 3\n5.35 4\n");
        CHECK(mentions(thrown_message([&] { load_laplace_spectrum(path); }),
                       "missing zero mode lambda_0 = 0 (multiplicity 1)"));
        std::remove(path.c_str());
    }

    SUBCASE("unsorted eigenvalues") {
        const auto path = write_tmp("spec_unsorted.dat",
                                    "surface demo\narea 12.566370614359172\n"
                                    "0 1\n5.35 4\n3.84 3\n");
        CHECK(mentions(thrown_message([&] { load_laplace_spectrum(path); }),
                       "not sorted"));
        std::remove(path.c_str());
    }

    SUBCASE("counting function far off the Weyl prediction") {
        // area 4 pi predicts ~50 eigenvalues below 50; two is a violation
        const auto path = write_tmp("spec_weyl.dat",
                                    "surface demo\narea 12.566370614359172\n"
                                    "0 1\n50.0 1\n");
        const auto msg = thrown_message([&] { load_laplace_spectrum(path); });
        CHECK(mentions(msg, "Weyl-law violation"));
        CHECK(mentions(msg, "counted 2"));
        CHECK(mentions(msg, "predicted 50"));
        std::remove(path.c_str());
    }

    SUBCASE("malformed level line") {
        const auto path = write_tmp("spec_badline.dat",
                                    "surface demo\narea 12.566370614359172\n"
                                    "0 1\n3.84 0\n");
        CHECK(mentions(thrown_message([&] { load_laplace_spectrum(path); }),
                       "expected `lambda multiplicity`"));
        std::remove(path.c_str());
    }

    SUBCASE("bad area quantization") {
        const auto path = write_tmp("spec_badarea.dat",
                                    "surface demo\narea 10.0\n0 1\n3.84 3\n");
        CHECK_THROWS_AS(load_laplace_spectrum(path), std::runtime_error);
        std::remove(path.c_str());
    }

    SUBCASE("missing file") {
        CHECK(mentions(thrown_message([] {
                  load_laplace_spectrum("no_such_spectrum_file.dat");
              }),
              "cannot open"));
    }
}

TEST_CASE("bundled base spectrum") {
    const std::string path = std::string(MAGTRACE_DATA_DIR) + "/bolza_laplace.dat";
    const auto L = load_laplace_spectrum(path);
    CHECK(L.surface_id == "bolza");
    CHECK(L.genus() == 2);
    CHECK(L.area == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
    CHECK(L.lambda_max >= 100.0);
    CHECK_FALSE(L.provenance.empty());

    // first nonzero levels of the genus-2 surface of maximal symmetry, as
    // established independently in the numerical literature
    struct Ref {
        double lambda;
        long long mult;
    };
    const Ref refs[] = {{3.8388872588, 3},
                        {5.3536013412, 4},
                        {8.2495548152, 2},
                        {14.7262167878, 4},
                        {15.0489161333, 3}};
    for (const auto& ref : refs) {
        bool found = false;
        for (const auto& [lam, mult] : L.lambdas)
            if (std::fabs(lam - ref.lambda) < 1e-4) {
                found = true;
                CHECK(mult == ref.mult);
            }
        CHECK_MESSAGE(found, "reference level ", ref.lambda, " missing");
    }

    // counting function tracks Area/(4 pi) * lambda
    const double ratio =
        static_cast<double>(L.count_upto(L.lambda_max)) / L.lambda_max;
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.2);
}

TEST_CASE("independent coarse recomputation of the first level") {
    // cross-check the shipped data with the cheap wall-collocation settings:
    // the lowest nonzero level must reappear within 1e-2, same multiplicity
    const std::string path = std::string(MAGTRACE_DATA_DIR) + "/bolza_laplace.dat";
    const auto L = load_laplace_spectrum(path);
    REQUIRE(L.lambdas.size() >= 2);
    const double lambda1 = L.lambdas[1].first;
    const long long mult1 = L.lambdas[1].second;

    const OctagonCollocation coarse(coarse_collocation_config());
    const auto hits = coarse.find_eigenvalues(lambda1 - 0.35, lambda1 + 0.35, 0.02);
    REQUIRE_FALSE(hits.empty());
    bool matched = false;
    for (const auto& h : hits)
        if (std::fabs(h.lambda - lambda1) < 1e-2) {
            matched = true;
            CHECK(h.multiplicity == mult1);
        }
    CHECK_MESSAGE(matched, "coarse scan found no level within 1e-2 of ", lambda1);
}

TEST_CASE("ladder identity at second-order step size") {
    // the factorization residual is a pure finite-difference artifact: halving
    // h must shrink it by about 4 on smooth non-trivial samples
    auto u = [](double x, double y) {
        return std::complex<double>(std::sin(1.3 * x) * std::cosh(0.4 * y),
                                    std::cos(0.7 * y) + 0.2 * x * y);
    };
    for (int N : {1, 3, 8}) {
        for (bool alt : {false, true}) {
            const double r1 = maass_identity_residual(N, u, 0.3, 1.4, 2e-3, alt);
            const double r2 = maass_identity_residual(N, u, 0.3, 1.4, 1e-3, alt);
            if (r2 > 1e-13) {
                const double ratio = r1 / r2;
                CHECK(ratio > 3.5);
                CHECK(ratio < 4.5);
            } else {
                CHECK(r1 < 1e-12);  // both already at rounding level
            }
        }
    }

    CHECK_THROWS_AS(maass_identity_residual(3, u, 0.0, 1.0, 1e-5),
                    std::invalid_argument);  // h below the supported window
    CHECK_THROWS_AS(maass_identity_residual(3, u, 0.0, 1.0, 0.5),
                    std::invalid_argument);  // h above it
    CHECK_THROWS_AS(maass_identity_residual(3, u, 0.0, -1.0, 1e-3),
                    std::invalid_argument);  // not in the upper half plane
}
