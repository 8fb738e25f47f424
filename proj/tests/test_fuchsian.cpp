#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "magtrace/fuchsian.hpp"
#include "magtrace/geometry.hpp"
#include "magtrace/util.hpp"

using namespace magtrace;

namespace {

// Brute-force oracle: enumerate every freely reduced word up to a fixed
// length, cyclically reduce, keep hyperbolic ones with norm below the cutoff,
// and group them into conjugacy classes by matching traces AND verifying
// conjugacy via an explicit search g w g^{-1} = v over short conjugators.
struct BruteClasses {
    std::vector<double> lengths;                 // sorted, one per class
    std::map<long long, int> class_sizes_by_key; // trace-keyed multiplicities
};

long long trace_key(double tr) { return std::llround(std::fabs(tr) * 1e7); }

BruteClasses brute_force_classes(const GroupPresentation& G, double max_norm, int max_len) {
    // depth-first over freely reduced words with an incremental product stack;
    // qualifying cyclic words are deduplicated by their canonical rotation
    std::map<Word, int> rep_of;  // canonical rotation -> class id
    std::vector<MoebiusElement> mats;
    auto canonical_rotation = [](const Word& w) {
        Word best = w;
        Word rot = w;
        for (std::size_t i = 1; i < w.size(); ++i) {
            std::rotate(rot.begin(), rot.begin() + 1, rot.end());
            best = std::min(best, rot);
        }
        return best;
    };
    Word cur;
    std::vector<MoebiusElement> stack{MoebiusElement::identity()};
    auto visit = [&](const MoebiusElement& m) {
        if (cur.front() == -cur.back()) return;           // not cyclically reduced
        if (std::fabs(m.trace()) <= 2.0 + 1e-12) return;  // not hyperbolic
        if (norm_of(m) > max_norm) return;
        if (!is_primitive(cur).primitive) return;
        const Word canon = canonical_rotation(cur);
        if (!rep_of.contains(canon)) {
            rep_of[canon] = static_cast<int>(mats.size());
            mats.push_back(m);
        }
    };
    auto rec = [&](auto&& self, int depth) -> void {
        if (!cur.empty()) visit(stack.back());
        if (depth == max_len) return;
        for (int lit : {1, -1, 2, -2, 3, -3, 4, -4}) {
            if (!cur.empty() && cur.back() == -lit) continue;
            cur.push_back(lit);
            stack.push_back(stack.back() * G.letter(lit));
            self(self, depth + 1);
            stack.pop_back();
            cur.pop_back();
        }
    };
    rec(rec, 0);
    // merge rotation-classes that are conjugate through a short group element
    std::vector<MoebiusElement> conjugators;
    {
        Word c2;
        auto rec2 = [&](auto&& self, int depth) -> void {
            conjugators.push_back(G.evaluate(c2));
            if (depth == 4) return;
            for (int lit : {1, -1, 2, -2, 3, -3, 4, -4}) {
                if (!c2.empty() && c2.back() == -lit) continue;
                c2.push_back(lit);
                self(self, depth + 1);
                c2.pop_back();
            }
        };
        rec2(rec2, 0);
    }
    std::vector<int> parent(mats.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < mats.size(); ++i)
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            if (trace_key(mats[i].trace()) != trace_key(mats[j].trace())) continue;
            if (find(static_cast<int>(i)) == find(static_cast<int>(j))) continue;
            for (const auto& gg : conjugators) {
                if ((gg * mats[i] * gg.inverse()).approx_equal(mats[j], 1e-7)) {
                    parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
                    break;
                }
            }
        }

    std::set<int> roots;
    BruteClasses out;
    for (std::size_t i = 0; i < mats.size(); ++i) roots.insert(find(static_cast<int>(i)));
    for (int r : roots) {
        out.lengths.push_back(translation_length(mats[r]));
        out.class_sizes_by_key[trace_key(mats[r].trace())] += 1;
    }
    std::sort(out.lengths.begin(), out.lengths.end());
    return out;
}

}  // namespace

TEST_CASE("word reduction") {
    CHECK(free_reduce({1, -1}) == Word{});
    CHECK(free_reduce({1, 2, -2, -1, 3}) == Word{3});
    CHECK(free_reduce({1, 2, -2, 3}) == Word{1, 3});
    CHECK(cyclic_reduce({1, 2, -1}) == Word{2});
    CHECK(cyclic_reduce({-3, 1, 2, 3}) == Word{1, 2});
    CHECK(cyclic_reduce({1, 2}) == Word{1, 2});
}

TEST_CASE("primitivity of cyclic words") {
    CHECK(is_primitive({1, 2}).primitive);
    const auto sq = is_primitive({1, 2, 1, 2});
    CHECK_FALSE(sq.primitive);
    CHECK(sq.k == 2);
    CHECK(sq.root == Word{1, 2});
    const auto cube = is_primitive({1, 1, 1});
    CHECK_FALSE(cube.primitive);
    CHECK(cube.k == 3);
    // rotated repetition is still imprimitive
    CHECK_FALSE(is_primitive({2, 1, 2, 1}).primitive);
    CHECK(is_primitive({1, 2, 1, -2}).primitive);
}

TEST_CASE("built-in surface group") {
    const auto G = bolza_group();
    CHECK(G.genus == 2);
    REQUIRE(G.generators.size() == 4);
    CHECK(G.relation_residual() < 1e-12);
    // all generators hyperbolic with the systolic trace 2 + 2 sqrt 2 except d
    CHECK(std::fabs(G.generators[0].mat.trace()) ==
          doctest::Approx(2 + 2 * std::sqrt(2.0)).epsilon(1e-12));
    for (const auto& g : G.generators) CHECK(std::fabs(g.mat.trace()) > 2.0);

    // letter/evaluate/word_str round trip
    const Word w{1, -2, 3};
    CHECK(G.word_str(w) == "ab'c");
    const auto m = G.letter(1) * G.letter(-2) * G.letter(3);
    CHECK(G.evaluate(w).approx_equal(m, 1e-12));
}

TEST_CASE("shipped data file matches the closed-form construction") {
    const char* env = std::getenv("MAGTRACE_DATA_DIR");
    const std::string dir = env ? env : MAGTRACE_DATA_DIR;
    const auto F = load_group(dir + "/bolza_group.txt");
    const auto G = bolza_group();
    CHECK(F.genus == 2);
    REQUIRE(F.generators.size() == 4);
    CHECK(F.relation_residual() < 1e-10);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(F.generators[i].name == G.generators[i].name);
        CHECK(F.generators[i].mat.dist(G.generators[i].mat) < 1e-12);
    }
}

TEST_CASE("group file validation errors") {
    CHECK_THROWS_AS(load_group("/nonexistent/group.txt"), std::runtime_error);
    // a broken relation must be rejected: write a temp file with d replaced
    const std::string path = "/tmp/magtrace_badgroup.txt";
    {
        std::ostringstream os;
        const auto G = bolza_group();
        os << "genus 2\n";
        for (int i = 0; i < 4; ++i) {
            const auto& g = G.generators[i].mat;
            if (i < 3)
                os << G.generators[i].name << " " << format_double(g.a) << " "
                   << format_double(g.b) << " " << format_double(g.c) << " "
                   << format_double(g.d) << "\n";
            else
                os << "d 1.5 0.5 0.5 1.5\n";  // wrong last generator
        }
        FILE* f = std::fopen(path.c_str(), "w");
        REQUIRE(f);
        const auto s = os.str();
        std::fwrite(s.data(), 1, s.size(), f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_group(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("norms, lengths, displacement bound") {
    const auto G = bolza_group();
    const auto a = G.generators[0].mat;
    const double tr = std::fabs(a.trace());
    const double N = std::pow((tr + std::sqrt(tr * tr - 4)) / 2, 2);
    CHECK(norm_of(a) == doctest::Approx(N).epsilon(1e-13));
    CHECK(translation_length(a) == doctest::Approx(std::log(N)).epsilon(1e-13));
    // the systole: 2 arccosh(1 + sqrt 2)
    CHECK(translation_length(a) ==
          doctest::Approx(2 * std::acosh(1 + std::sqrt(2.0))).epsilon(1e-12));
    CHECK_THROWS_AS(norm_of(rotation_about_i(0.3)), std::invalid_argument);
    CHECK_THROWS_AS(norm_of(MoebiusElement::identity()), std::invalid_argument);
}

TEST_CASE("class enumeration against the brute-force oracle") {
    const auto G = bolza_group();
    // the two shortest primitive lengths are ~3.0571 and ~4.8969; cut between
    // 4.8969 and the next level at ~5.8281
    const double max_norm = std::exp(5.4);
    const auto list = enumerate_classes(G, max_norm, 12);
    CHECK(list.exhaustive);

    const auto brute = brute_force_classes(G, max_norm, 8);
    REQUIRE_FALSE(brute.lengths.empty());
    REQUIRE(list.classes.size() == brute.lengths.size());
    for (std::size_t i = 0; i < list.classes.size(); ++i) {
        CHECK(list.classes[i].length == doctest::Approx(brute.lengths[i]).epsilon(1e-9));
        CHECK(list.classes[i].primitive);
    }

    // systole multiplicity: count classes at the bottom length
    const double lsys = 2 * std::acosh(1 + std::sqrt(2.0));
    int at_systole = 0;
    for (const auto& c : list.classes)
        if (std::fabs(c.length - lsys) < 1e-9) ++at_systole;
    // the shortest closed geodesic comes in its full symmetry orbit
    CHECK(at_systole > 1);
    const long long key = trace_key(2 + 2 * std::sqrt(2.0));
    CHECK(at_systole == brute.class_sizes_by_key.at(key));

    // list is sorted by norm, classes unique by representative matrix
    for (std::size_t i = 1; i < list.classes.size(); ++i)
        CHECK(list.classes[i].norm >= list.classes[i - 1].norm - 1e-12);
}

TEST_CASE("enumeration certificate reports its limits") {
    const auto G = bolza_group();
    // word-length cap too small for the requested norm: certificate must fail
    const auto list = enumerate_classes(G, std::exp(12.0), 3);
    CHECK_FALSE(list.exhaustive);
    CHECK_FALSE(list.note.empty());
}

TEST_CASE("classes CSV") {
    const auto G = bolza_group();
    const auto list = enumerate_classes(G, 60.0, 10);
    std::ostringstream os;
    write_classes_csv(list, os);
    const std::string csv = os.str();
    CHECK(csv.find("word,trace,norm,length,primitive") == 0);
    CHECK(csv.find("a,") != std::string::npos);
    // one line per class plus header
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(list.classes.size()) + 1);
}
