#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "magtrace/moebius.hpp"

namespace magtrace {

// A word in the generators: signed 1-based letters, +k = generator k-1,
// -k = its inverse.
using Word = std::vector<int>;

Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);

struct Generator {
    std::string name;
    MoebiusElement mat;
};

// Cocompact torsion-free Fuchsian group given by 2*genus generators subject
// to the product-of-commutators surface relation.
struct GroupPresentation {
    int genus{};
    std::vector<Generator> generators;
    std::string source;

    MoebiusElement letter(int lit) const;        // signed 1-based
    MoebiusElement evaluate(const Word& w) const;
    std::string word_str(const Word& w) const;   // e.g. "ab'c" (prime = inverse)

    // || [g1,g2][g3,g4]... - (+-I) ||_inf
    double relation_residual() const;
};

// Text format: optional '#' comments, `genus <g>` header, then per line
// `name a b c d` with decimal entries.  Validates the relation to 1e-8 and
// hyperbolicity of the generators.
GroupPresentation load_group(const std::string& path);

// The genus-2 surface of maximal symmetry: generators are rotations of the
// translation pairing opposite sides of the regular octagon, recombined into
// a commutator basis a, b, c, d with [a,b][c,d] = 1.  This closed-form
// construction is the source of the shipped data file.
GroupPresentation bolza_group();

// N(h) = ((|tr| + sqrt(tr^2-4))/2)^2; throws on |tr| <= 2.
double norm_of(const MoebiusElement& h);
// log N(h): the length of the closed geodesic of the class of h.
double translation_length(const MoebiusElement& h);

struct PrimitivityResult {
    bool primitive{};
    Word root;   // the repeated block (the word itself when primitive)
    int k{1};    // repetition count
};
// Cyclic-word check: a word is imprimitive iff it is a k-fold repetition
// (k >= 2) of a shorter cyclic block.
PrimitivityResult is_primitive(const Word& cyclically_reduced);

struct ConjugacyClassRecord {
    Word word;              // cyclically reduced representative word
    std::string word_str;
    MoebiusElement rep;     // evaluate(word)
    double trace{};         // |tr rep|
    double norm{};          // N > 1
    double length{};        // log N
    bool primitive{true};
};

struct ClassList {
    std::vector<ConjugacyClassRecord> classes;  // sorted by norm ascending
    bool exhaustive{};                          // completeness certificate
    double norm_bound{};
    int max_word_length{};
    std::string note;                           // certificate diagnostics
};

// All primitive conjugacy classes with N(h) <= max_norm, each exactly once,
// sorted by norm.  Certificate is "exhaustive" only when the displacement-
// pruned search provably covered the norm bound; see implementation notes.
ClassList enumerate_classes(const GroupPresentation& G, double max_norm,
                            int max_word_length = 16);

// CSV: word,trace,norm,length,primitive
void write_classes_csv(const ClassList& list, std::ostream& os);

}  // namespace magtrace
