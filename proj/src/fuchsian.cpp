#include "magtrace/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "magtrace/geometry.hpp"
#include "magtrace/util.hpp"

namespace magtrace {

// ---------------------------------------------------------------------------
// words

Word free_reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (int lit : w) {
        if (lit == 0) throw std::invalid_argument("word letter 0");
        if (!out.empty() && out.back() == -lit)
            out.pop_back();
        else
            out.push_back(lit);
    }
    return out;
}

Word cyclic_reduce(const Word& w0) {
    Word w = free_reduce(w0);
    while (w.size() >= 2 && w.front() == -w.back()) {
        w.erase(w.begin());
        w.pop_back();
    }
    return w;
}

PrimitivityResult is_primitive(const Word& w) {
    const std::size_t n = w.size();
    for (std::size_t p = 1; p <= n / 2; ++p) {
        if (n % p != 0) continue;
        bool rep = true;
        for (std::size_t i = p; i < n && rep; ++i)
            if (w[i] != w[i - p]) rep = false;
        if (rep)
            return {false, Word(w.begin(), w.begin() + p), static_cast<int>(n / p)};
    }
    return {true, w, 1};
}

MoebiusElement GroupPresentation::letter(int lit) const {
    const int idx = std::abs(lit) - 1;
    if (lit == 0 || idx >= static_cast<int>(generators.size()))
        throw std::invalid_argument("letter index out of range");
    return lit > 0 ? generators[idx].mat : generators[idx].mat.inverse();
}

MoebiusElement GroupPresentation::evaluate(const Word& w) const {
    MoebiusElement g;
    for (int lit : w) g = g * letter(lit);
    return g;
}

std::string GroupPresentation::word_str(const Word& w) const {
    if (w.empty()) return "e";
    bool single = true;
    for (const auto& g : generators)
        if (g.name.size() != 1) single = false;
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i) s += '.';
        s += generators[std::abs(w[i]) - 1].name;
        if (w[i] < 0) s += '\'';
    }
    return s;
}

double GroupPresentation::relation_residual() const {
    MoebiusElement r;
    for (int i = 0; i + 1 < static_cast<int>(generators.size()); i += 2) {
        const MoebiusElement&g1 = generators[i].mat, &g2 = generators[i + 1].mat;
        r = r * g1 * g2 * g1.inverse() * g2.inverse();
    }
    return r.dist(MoebiusElement::identity());
}

// ---------------------------------------------------------------------------
// loading and the built-in maximal-symmetry genus-2 group

GroupPresentation load_group(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open group file: " + path);
    GroupPresentation G;
    G.source = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.resize(pos);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "genus") {
            if (!(ls >> G.genus) || G.genus < 2)
                throw std::runtime_error("group file line " + std::to_string(lineno) +
                                         ": bad genus");
            continue;
        }
        double a, b, c, d;
        if (!(ls >> a >> b >> c >> d))
            throw std::runtime_error("group file line " + std::to_string(lineno) +
                                     ": expected `name a b c d`");
        try {
            G.generators.push_back({tok, MoebiusElement(a, b, c, d)});
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("group file line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    if (G.genus == 0) throw std::runtime_error("group file: missing `genus` header");
    if (static_cast<int>(G.generators.size()) != 2 * G.genus)
        throw std::runtime_error("group file: expected " + std::to_string(2 * G.genus) +
                                 " generators, got " + std::to_string(G.generators.size()));
    const double res = G.relation_residual();
    if (res > 1e-8)
        throw std::runtime_error("group file: surface relation residual " +
                                 format_double(res) + " exceeds 1e-8");
    for (const auto& g : G.generators)
        if (std::fabs(g.mat.trace()) <= 2.0)
            throw std::runtime_error("group file: generator " + g.name +
                                     " is not hyperbolic (|trace| <= 2)");
    return G;
}

GroupPresentation bolza_group() {
    // Regular octagon centered at i with vertex angle 2pi/8; opposite sides
    // are paired by the translation T of length 2*arccosh(1+sqrt2) along the
    // geodesic through i meeting the real axis at +-1, and its conjugates by
    // rotations of pi/4 about i: s_k = K(k pi/4) T K(k pi/4)^{-1}, k = 0..3.
    // The commutator basis below satisfies [a,b][c,d] = 1:
    //   a = s0, b = s1^{-1} s2 s3^{-1}, c = s1^{-1} s2, d = s3^{-1} s1.
    const double q = 1.0 + std::sqrt(2.0);
    const double s = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));
    const MoebiusElement T(q, s, s, q);
    std::array<MoebiusElement, 4> sk;
    for (int k = 0; k < 4; ++k) {
        const MoebiusElement R = rotation_about_i(k * M_PI / 4);
        sk[k] = R * T * R.inverse();
    }
    GroupPresentation G;
    G.genus = 2;
    G.source = "builtin";
    G.generators = {
        {"a", sk[0]},
        {"b", sk[1].inverse() * sk[2] * sk[3].inverse()},
        {"c", sk[1].inverse() * sk[2]},
        {"d", sk[3].inverse() * sk[1]},
    };
    return G;
}

// ---------------------------------------------------------------------------
// norms

double norm_of(const MoebiusElement& h) {
    const double t = std::fabs(h.trace());
    if (t <= 2.0)
        throw std::invalid_argument("non-hyperbolic element (|trace| = " +
                                    format_double(t) + " <= 2)");
    const double mu = (t + std::sqrt(t * t - 4.0)) / 2.0;
    return mu * mu;
}

double translation_length(const MoebiusElement& h) {
    const double t = std::fabs(h.trace());
    if (t <= 2.0)
        throw std::invalid_argument("non-hyperbolic element (|trace| = " +
                                    format_double(t) + " <= 2)");
    return 2.0 * std::acosh(t / 2.0);
}

// ---------------------------------------------------------------------------
// displacement-pruned ball enumeration
//
// Elements are deduplicated through a quantized hash of asinh-compressed
// matrix entries; the sign used for hashing is fixed by the first entry that
// is decisively nonzero (every unit-determinant matrix has one), so the hash
// is stable even when the canonical-sign convention is decided by an entry
// that is only zero up to rounding.

namespace {

constexpr double kQuantScale = 1e6;   // cells in asinh space
constexpr double kMatchTol = 1e-9;    // matrix equality (relative-ish)

struct QuantKey {
    std::int64_t q[4];
    bool operator==(const QuantKey& o) const {
        return q[0] == o.q[0] && q[1] == o.q[1] && q[2] == o.q[2] && q[3] == o.q[3];
    }
};

struct QuantKeyHash {
    std::size_t operator()(const QuantKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (int i = 0; i < 4; ++i) {
            std::uint64_t x = static_cast<std::uint64_t>(k.q[i]);
            x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
            x ^= x >> 27; x *= 0x94d049bb133111ebull;
            x ^= x >> 31;
            h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

void hash_sign(const MoebiusElement& g, double out[4]) {
    double e[4] = {g.a, g.b, g.c, g.d};
    double sgn = 1.0;
    for (double v : e) {
        if (std::fabs(v) > 0.25) { sgn = v > 0 ? 1.0 : -1.0; break; }
    }
    for (int i = 0; i < 4; ++i) out[i] = sgn * e[i];
}

QuantKey primary_key(const MoebiusElement& g) {
    double e[4];
    hash_sign(g, e);
    QuantKey k{};
    for (int i = 0; i < 4; ++i) k.q[i] = std::llround(std::asinh(e[i]) * kQuantScale);
    return k;
}

// All keys a numerically-equal matrix could quantize to (straddle probing).
void probe_keys(const MoebiusElement& g, std::vector<QuantKey>& out) {
    double e[4];
    hash_sign(g, e);
    double v[4];
    int lo[4], hi[4];
    for (int i = 0; i < 4; ++i) {
        v[i] = std::asinh(e[i]) * kQuantScale;
        const double r = std::round(v[i]);
        lo[i] = hi[i] = 0;
        if (v[i] - (r - 0.5) < 1e-3) lo[i] = -1;
        if ((r + 0.5) - v[i] < 1e-3) hi[i] = 1;
    }
    out.clear();
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
            for (int i2 = lo[2]; i2 <= hi[2]; ++i2)
                for (int i3 = lo[3]; i3 <= hi[3]; ++i3) {
                    QuantKey k{};
                    k.q[0] = std::llround(v[0]) + i0;
                    k.q[1] = std::llround(v[1]) + i1;
                    k.q[2] = std::llround(v[2]) + i2;
                    k.q[3] = std::llround(v[3]) + i3;
                    out.push_back(k);
                }
}

double match_tol(const MoebiusElement& g) {
    const double m = std::max({std::fabs(g.a), std::fabs(g.b), std::fabs(g.c),
                               std::fabs(g.d), 1.0});
    return kMatchTol * m;
}

// word stored as compact letter codes: code = 2*(k-1) for generator k,
// 2*(k-1)+1 for its inverse; free cancellation = xor of the low bit.
using Code = std::string;

Code code_append(const Code& w, const Code& suffix) {
    Code out = w;
    for (char c : suffix) {
        if (!out.empty() && out.back() == (c ^ 1))
            out.pop_back();
        else
            out.push_back(c);
    }
    return out;
}

Word code_to_word(const Code& c) {
    Word w;
    w.reserve(c.size());
    for (char ch : c) {
        const int k = (static_cast<unsigned char>(ch) >> 1) + 1;
        w.push_back((ch & 1) ? -k : k);
    }
    return w;
}

struct Node {
    MoebiusElement g;
    Code word;
    double disp;
};

class ElementSet {
  public:
    // Returns index of the element equal to g, or SIZE_MAX.
    std::size_t find(const MoebiusElement& g) const {
        probe_keys(g, scratch_);
        for (const auto& k : scratch_) {
            auto it = map_.find(k);
            if (it == map_.end()) continue;
            for (std::uint32_t idx : it->second)
                if (nodes_[idx].g.dist(g) <= match_tol(g)) return idx;
        }
        return SIZE_MAX;
    }

    std::size_t insert(Node n) {
        nodes_.push_back(std::move(n));
        const std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size() - 1);
        map_[primary_key(nodes_.back().g)].push_back(idx);
        return idx;
    }

    std::vector<Node>& nodes() { return nodes_; }
    const std::vector<Node>& nodes() const { return nodes_; }

  private:
    std::vector<Node> nodes_;
    std::unordered_map<QuantKey, std::vector<std::uint32_t>, QuantKeyHash> map_;
    mutable std::vector<QuantKey> scratch_;
};

struct Edge {
    MoebiusElement g;
    Code word;
};

struct BallResult {
    ElementSet set;
    bool displacement_exhausted{true};  // no node/depth caps interfered
};

BallResult ball_bfs(const std::vector<Edge>& edges, double r_prune,
                    std::size_t node_cap) {
    BallResult res;
    res.set.insert({MoebiusElement::identity(), Code{}, 0.0});
    std::vector<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t idx : frontier) {
            const Node cur = res.set.nodes()[idx];  // copy: vector may grow
            for (const Edge& e : edges) {
                MoebiusElement g = cur.g * e.g;
                const double disp = g.displacement();
                if (disp > r_prune) continue;
                const std::size_t found = res.set.find(g);
                Code w = code_append(cur.word, e.word);
                if (found != SIZE_MAX) {
                    if (w.size() < res.set.nodes()[found].word.size())
                        res.set.nodes()[found].word = std::move(w);
                    continue;
                }
                if (res.set.nodes().size() >= node_cap) {
                    res.displacement_exhausted = false;
                    return res;
                }
                next.push_back(res.set.insert({g, std::move(w), disp}));
            }
        }
        frontier = std::move(next);
    }
    return res;
}

// Circumradius of the Dirichlet domain about i, from the orbit ball:
// along the ray at angle phi, the domain ends at the nearest perpendicular
// bisector of [i, gamma i]; crossing radius solves
// coth r = cos(phi - psi) coth(D/2) with D = disp(gamma), psi = direction.
double dirichlet_circumradius(const std::vector<Node>& nodes, double disp_cut) {
    struct Wall { double D, psi; };
    std::vector<Wall> walls;
    for (const auto& n : nodes) {
        if (n.disp <= 1e-12 || n.disp > disp_cut) continue;
        const auto p = halfplane_to_pseudosphere(
            HPoint(n.g.apply({0.0, 1.0}).real(), n.g.apply({0.0, 1.0}).imag()));
        walls.push_back({n.disp, p.phi});
    }
    if (walls.empty())
        throw NumericalError("dirichlet_circumradius: no walls below cutoff");
    const int M = 4096;
    double rmax = 0.0;
    for (int a = 0; a < M; ++a) {
        const double phi = 2.0 * M_PI * a / M;
        double r = std::numeric_limits<double>::infinity();
        for (const auto& w : walls) {
            const double u = std::cos(phi - w.psi) / std::tanh(w.D / 2);
            if (u > 1.0) r = std::min(r, std::atanh(1.0 / u));
        }
        if (!std::isfinite(r))
            throw NumericalError("dirichlet_circumradius: unbounded ray (ball too small)");
        rmax = std::max(rmax, r);
    }
    // vertices are transversal wall intersections; pad for the angular grid
    return rmax * (1.0 + 1e-4) + 1e-4;
}

// distance from i to the translation axis, from displacement and length:
// sinh(disp/2) = cosh(d_axis) sinh(len/2).
double axis_offset(double disp, double len) {
    const double q = std::sinh(disp / 2) / std::sinh(len / 2);
    return q <= 1.0 ? 0.0 : std::acosh(q);
}

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t i) { while (p[i] != i) i = p[i] = p[p[i]]; return i; }
    void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

}  // namespace

// ---------------------------------------------------------------------------

ClassList enumerate_classes(const GroupPresentation& G, double max_norm,
                            int max_word_length) {
    if (!(max_norm > 1.0)) throw std::invalid_argument("enumerate_classes: max_norm <= 1");
    ClassList out;
    out.norm_bound = max_norm;
    out.max_word_length = max_word_length;
    out.exhaustive = true;

    const double ell_max = std::log(max_norm);

    // letter edge set
    std::vector<Edge> letters;
    for (int k = 1; k <= static_cast<int>(G.generators.size()); ++k) {
        letters.push_back({G.letter(k), Code(1, static_cast<char>(2 * (k - 1)))});
        letters.push_back({G.letter(-k), Code(1, static_cast<char>(2 * (k - 1) + 1))});
    }

    // Bootstrap: find the Dirichlet side pairings.  A letters-only ball can
    // in principle miss elements (letters need not pair Dirichlet sides), so
    // the side-pairing set found here is re-validated after the main pass.
    double r_boot = 9.0;
    double r_dir = 0.0;
    std::vector<Edge> sides;
    for (int attempt = 0;; ++attempt) {
        BallResult boot = ball_bfs(letters, r_boot, 400'000);
        r_dir = dirichlet_circumradius(boot.set.nodes(), r_boot);
        if (2.0 * r_dir + 1e-6 <= r_boot - 1.0) {
            sides = letters;
            for (const auto& n : boot.set.nodes())
                if (n.disp > 1e-12 && n.disp <= 2.0 * r_dir + 1e-6 && n.word.size() > 1)
                    sides.push_back({n.g, n.word});
            break;
        }
        if (attempt == 3) {
            out.exhaustive = false;
            out.note = "side-pairing bootstrap did not converge";
            sides = letters;
            break;
        }
        r_boot *= 1.5;
    }

    // Main displacement-pruned ball over the side-pairing alphabet.  The
    // chain property of Dirichlet tilings guarantees every element with
    // displacement <= r_cand is reachable through nodes of displacement
    // <= r_cand + 2 r_dir once the edge set contains all side pairings.
    const double r_cand_global = ell_max + 2.0 * r_dir + 1e-6;
    const double r_prune = r_cand_global + 2.0 * r_dir + 1e-6;
    BallResult main = ball_bfs(sides, r_prune, 6'000'000);
    if (!main.displacement_exhausted) {
        out.exhaustive = false;
        out.note = "node cap reached before displacement frontier was exhausted";
    }
    const std::vector<Node>& nodes = main.set.nodes();

    // Re-validate the side-pairing set against the (more complete) main ball.
    if (out.exhaustive) {
        const double r_dir2 = dirichlet_circumradius(nodes, r_boot);
        if (r_dir2 > r_dir + 1e-9) {
            out.exhaustive = false;
            out.note = "side-pairing set was derived from a smaller circumradius estimate";
        }
    }

    // Candidate elements: hyperbolic, norm within bound, near-minimal
    // displacement for their own length (disp <= len + 2 r_dir).
    struct Cand {
        std::size_t node;
        double tr, len;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.disp <= 1e-12) continue;  // identity
        const double tr = std::fabs(n.g.trace());
        if (tr <= 2.0 + 1e-9) {
            if (n.g.dist(MoebiusElement::identity()) > 1e-6)
                throw NumericalError("non-hyperbolic nonidentity element in ball: word " +
                                     G.word_str(code_to_word(n.word)));
            continue;
        }
        const double len = 2.0 * std::acosh(tr / 2.0);
        if (len > ell_max * (1.0 + 1e-12) + 1e-12) continue;
        if (n.disp > len + 2.0 * r_dir + 1e-6) continue;
        cands.push_back({i, tr, len});
    }
    std::sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
        if (x.tr != y.tr) return x.tr < y.tr;
        const auto &gx = nodes[x.node].g, &gy = nodes[y.node].g;
        return std::lexicographical_compare(&gx.a, &gx.a + 4, &gy.a, &gy.a + 4);
    });

    // trace buckets
    std::vector<std::pair<std::size_t, std::size_t>> buckets;
    for (std::size_t i = 0; i < cands.size();) {
        std::size_t j = i + 1;
        while (j < cands.size() && cands[j].tr - cands[j - 1].tr <= 1e-9) ++j;
        buckets.emplace_back(i, j);
        i = j;
    }

    // conjugator pool sorted by displacement (prefix of it serves as the
    // signature ball for each bucket)
    std::vector<std::size_t> by_disp(nodes.size());
    std::iota(by_disp.begin(), by_disp.end(), 0);
    std::sort(by_disp.begin(), by_disp.end(), [&](std::size_t a, std::size_t b) {
        if (nodes[a].disp != nodes[b].disp) return nodes[a].disp < nodes[b].disp;
        const auto &ga = nodes[a].g, &gb = nodes[b].g;
        return std::lexicographical_compare(&ga.a, &ga.a + 4, &gb.a, &gb.a + 4);
    });

    UnionFind uf(cands.size());
    std::unordered_map<QuantKey, std::vector<std::pair<std::uint32_t, MoebiusElement>>,
                       QuantKeyHash> sig;
    std::vector<QuantKey> probes;

    for (const auto& [b0, b1] : buckets) {
        if (b1 - b0 == 1) continue;  // singleton bucket: nothing to merge
        // Conjugator radius: gamma carrying one near-minimal representative
        // to another satisfies disp(gamma) <= len/2 + 2*max axis offset; the
        // two-sided signature trick halves it.
        double off = 0.0;
        const double len = cands[b0].len;
        for (std::size_t c = b0; c < b1; ++c)
            off = std::max(off, axis_offset(nodes[cands[c].node].disp, cands[c].len));
        const double r_conj = (len / 2 + 2 * off) / 2 + r_dir + 0.25;
        sig.clear();
        for (std::size_t c = b0; c < b1; ++c) {
            const MoebiusElement& h = nodes[cands[c].node].g;
            for (std::size_t k : by_disp) {
                const Node& gn = nodes[k];
                if (gn.disp > r_conj) break;
                const MoebiusElement m = gn.g * h * gn.g.inverse();
                probe_keys(m, probes);
                bool seen = false;
                for (const auto& pk : probes) {
                    auto it = sig.find(pk);
                    if (it == sig.end()) continue;
                    for (const auto& [other, mat] : it->second) {
                        if (mat.dist(m) <= match_tol(m)) {
                            if (other != c - b0) uf.unite(b0 + other, c);
                            seen = true;
                            break;
                        }
                    }
                    if (seen) break;
                }
                if (!seen)
                    sig[primary_key(m)].emplace_back(static_cast<std::uint32_t>(c - b0), m);
            }
        }
    }

    // collect classes: representative = member with the shortest word
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < cands.size(); ++c) groups[uf.find(c)].push_back(c);

    struct PreClass {
        Word word;
        MoebiusElement rep;
        double trace, norm, length;
    };
    std::vector<PreClass> pre;
    for (const auto& [root, members] : groups) {
        (void)root;
        const Code* best = nullptr;
        for (std::size_t c : members) {
            const Code& w = nodes[cands[c].node].word;
            if (!best || w.size() < best->size() || (w.size() == best->size() && w < *best))
                best = &w;
        }
        Word word = cyclic_reduce(code_to_word(*best));
        MoebiusElement rep = G.evaluate(word);
        const double tr = std::fabs(rep.trace());
        pre.push_back({std::move(word), rep, tr, norm_of(rep), translation_length(rep)});
    }
    std::sort(pre.begin(), pre.end(), [](const PreClass& x, const PreClass& y) {
        if (x.norm != y.norm) return x.norm < y.norm;
        return x.word < y.word;
    });

    // geometric primitivity: drop classes conjugate to a power of a shorter one
    const double len_min = pre.empty() ? 0.0 : pre.front().length;
    std::vector<bool> keep(pre.size(), true);
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const double li = pre[i].length;
        for (int k = 2; li / k >= len_min - 1e-9; ++k) {
            for (std::size_t j = 0; j < i && pre[j].length * k <= li + 1e-7; ++j) {
                if (std::fabs(pre[j].length * k - li) > 1e-7 * (1.0 + li)) continue;
                MoebiusElement pw;
                for (int m = 0; m < k; ++m) pw = pw * pre[j].rep;
                const double off = axis_offset(pre[i].rep.displacement(), li);
                const double r_conj = li / 2 + 2 * off + 2 * r_dir + 0.25;
                for (std::size_t idx : by_disp) {
                    if (nodes[idx].disp > r_conj) break;
                    const MoebiusElement m2 = nodes[idx].g * pw * nodes[idx].g.inverse();
                    if (m2.dist(pre[i].rep) <= match_tol(pre[i].rep)) {
                        keep[i] = false;
                        break;
                    }
                }
                if (!keep[i]) break;
            }
            if (!keep[i]) break;
        }
    }

    for (std::size_t i = 0; i < pre.size(); ++i) {
        if (!keep[i]) continue;
        auto& p = pre[i];
        const auto prim = is_primitive(p.word);
        if (!prim.primitive)
            throw NumericalError("class word " + G.word_str(p.word) +
                                 " is a proper power but passed the geometric filter");
        if (static_cast<int>(p.word.size()) > max_word_length) {
            out.exhaustive = false;
            out.note = "class with minimal word longer than max_word_length omitted";
            continue;
        }
        ConjugacyClassRecord rec;
        rec.word = std::move(p.word);
        rec.word_str = G.word_str(rec.word);
        rec.rep = p.rep;
        rec.trace = p.trace;
        rec.norm = p.norm;
        rec.length = p.length;
        rec.primitive = true;
        out.classes.push_back(std::move(rec));
    }
    return out;
}

void write_classes_csv(const ClassList& list, std::ostream& os) {
    os << "word,trace,norm,length,primitive\n";
    for (const auto& r : list.classes)
        os << r.word_str << ',' << format_double(r.trace) << ',' << format_double(r.norm)
           << ',' << format_double(r.length) << ',' << (r.primitive ? 1 : 0) << '\n';
}

}  // namespace magtrace
