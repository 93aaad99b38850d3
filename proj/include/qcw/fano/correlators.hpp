#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcw/fano/model.hpp"
#include "qcw/linexpr.hpp"
#include "qcw/rational.hpp"

namespace qcw::fano {

// Normalized label of a primitive genus-zero invariant: curve degree d >= 1
// and a sorted list of insertion codimensions, each 2 or 3 (degree-1 and
// degree-0 insertions are eliminated by the divisor/fundamental-class
// rules before a key is formed).
struct CorrelatorKey {
    int d = 0;
    std::vector<int> insertions; // ascending, values in {2,3}

    bool operator<(const CorrelatorKey& o) const {
        if (d != o.d) return d < o.d;
        return insertions < o.insertions;
    }
    bool operator==(const CorrelatorKey& o) const {
        return d == o.d && insertions == o.insertions;
    }
};

std::string key_to_string(const CorrelatorKey& k); // "[d; a1,a2,...]"
CorrelatorKey key_from_string(const std::string& s);

// Result of reducing an arbitrary symbol <d; a1..an>: either identically
// zero, or factor * (primitive key).
struct NormalizedSymbol {
    bool zero = false;
    Rational factor = Rational(1);
    CorrelatorKey key;
};

// Applies the reduction rules: insertions equal to 1 each contribute a
// factor d; insertions equal to 0 kill the invariant (d >= 1); remaining
// insertions are sorted.  Values outside 0..3 are rejected.
NormalizedSymbol normalize_symbol(int d, const std::vector<int>& insertions);

// Dimension constraint for a primitive key: sum (a_i - 1) = d * index, d >= 1.
bool grading_admissible(const Model& m, const CorrelatorKey& key);

// All admissible primitive keys of curve degree d with at most max_insertions
// insertions, in ascending key order.
std::vector<CorrelatorKey> admissible_keys(const Model& m, int d, int max_insertions);

enum class Provenance { Seed, Reconstructed };

struct CorrelatorEntry {
    Rational value;
    Provenance provenance = Provenance::Seed;
};

// A table of primitive invariant values for one model, with full evaluation
// of arbitrary symbols through the reduction rules.
class CorrelatorTable {
public:
    explicit CorrelatorTable(const Model& m) : model_(&m) {}

    const Model& model() const { return *model_; }
    const std::map<CorrelatorKey, CorrelatorEntry>& entries() const { return entries_; }

    void set(const CorrelatorKey& key, Rational value, Provenance prov);
    bool contains(const CorrelatorKey& key) const { return entries_.count(key) > 0; }

    // Value of a primitive admissible key; throws VerificationError when the
    // key is admissible but missing from the table.
    Rational primitive(const CorrelatorKey& key) const;

    // Full evaluation of <d; a1..an>: applies normalization, returns 0 for
    // inadmissible symbols.
    Rational evaluate(int d, const std::vector<int>& insertions) const;

private:
    const Model* model_;
    std::map<CorrelatorKey, CorrelatorEntry> entries_;
};

struct ReconstructOptions {
    // Invariants are tracked up to this many non-divisor insertions; the
    // associativity constraints are expanded from the generating potential
    // truncated at this total jet degree.
    int max_insertions = 5;
    bool strict = true; // throw when a key with <= 4 insertions stays free
};

struct StageDiagnostics {
    int degree = 0;
    std::size_t unknowns = 0;
    std::size_t equations = 0;    // linear constraints fed to elimination
    std::size_t independent = 0;  // rank of the linear stage system
    std::size_t solved = 0;       // unknowns pinned at this stage (all sources)
    std::size_t quadratic = 0;    // constraints quadratic in the unknowns
    std::size_t closed = 0;       // unknowns pinned via the quadratic closure
};

struct ReconstructReport {
    CorrelatorTable table;
    std::vector<CorrelatorKey> undetermined; // still-free keys (diagnostic)
    std::vector<StageDiagnostics> stages;
};

// Determines all primitive invariants up to the model's maximal curve degree
// from the seed values, by solving the associativity constraints of the
// jet-extended product degree by degree.  Seeds are verified for
// consistency; a contradiction raises VerificationError.  Keys with at most
// 4 insertions (and the 5-insertion keys needed by the jet-extended
// product) must come out determined, otherwise VerificationError; remaining
// free 5-insertion keys are reported as diagnostics.
ReconstructReport reconstruct_correlators(const Model& m,
                                          const std::map<CorrelatorKey, Rational>& seeds,
                                          const ReconstructOptions& opt = {});

// Seed sets shipped as a versioned data file.
std::map<CorrelatorKey, Rational> load_seeds(const std::string& path, const Model& m);
std::map<CorrelatorKey, Rational> default_seeds(const Model& m);
std::string default_seed_path();

} // namespace qcw::fano
