#include "qcw/fano/correlators.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcw/errors.hpp"
#include "qcw/fano/algebra.hpp"
#include "qcw/linexpr.hpp"
#include "qcw/poly.hpp"

namespace qcw::fano {

namespace {

const std::vector<Model> kModels = {
    // name, index, degree, max curve degree carrying required invariants
    {"Q", 3, 2, 3},
    {"V5", 2, 5, 5},
    {"V22", 1, 22, 10},
};

std::string upper(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

const std::vector<Model>& all_models() { return kModels; }

const Model& model_by_name(const std::string& name) {
    const std::string n = upper(name);
    for (const auto& m : kModels)
        if (m.name == n) return m;
    throw UsageError("unknown model '" + name + "' (expected Q, V5 or V22)");
}

Rational classical_triple(const Model& m, int a, int b, int c) {
    if (a < 0 || a > 3 || b < 0 || b > 3 || c < 0 || c > 3)
        throw AlgebraError("basis index outside 0..3");
    if (a + b + c != 3) return Rational(0);
    std::array<int, 3> v{a, b, c};
    std::sort(v.begin(), v.end());
    if (v == std::array<int, 3>{0, 0, 3}) return Rational(1);
    if (v == std::array<int, 3>{0, 1, 2}) return Rational(1);
    return Rational(m.degree); // {1,1,1}
}

Rational cup_coefficient(const Model& m, int a, int b) {
    if (a < 0 || a > 3 || b < 0 || b > 3)
        throw AlgebraError("basis index outside 0..3");
    if (a + b > 3) return Rational(0);
    return classical_triple(m, a, b, 3 - a - b);
}

std::string key_to_string(const CorrelatorKey& k) {
    std::ostringstream os;
    os << "[" << k.d << ";";
    for (std::size_t i = 0; i < k.insertions.size(); ++i)
        os << (i == 0 ? " " : ",") << k.insertions[i];
    os << "]";
    return os.str();
}

CorrelatorKey key_from_string(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.size() < 4 || t.front() != '[' || t.back() != ']')
        throw UsageError("malformed invariant key '" + s + "' (expected \"[d; a1,a2,...]\")");
    t = t.substr(1, t.size() - 2);
    auto semi = t.find(';');
    if (semi == std::string::npos)
        throw UsageError("malformed invariant key '" + s + "': missing ';'");
    CorrelatorKey k;
    try {
        std::size_t used = 0;
        k.d = std::stoi(t.substr(0, semi), &used);
        if (used != semi) throw std::invalid_argument("trailing");
        std::string rest = t.substr(semi + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto comma = rest.find(',', pos);
            std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            if (item.empty()) throw std::invalid_argument("empty");
            k.insertions.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    } catch (const std::exception&) {
        throw UsageError("malformed invariant key '" + s + "' (expected \"[d; a1,a2,...]\")");
    }
    std::sort(k.insertions.begin(), k.insertions.end());
    return k;
}

NormalizedSymbol normalize_symbol(int d, const std::vector<int>& insertions) {
    if (d < 1) throw AlgebraError("curve degree must be at least 1");
    NormalizedSymbol out;
    out.key.d = d;
    for (int a : insertions) {
        if (a < 0 || a > 3) throw AlgebraError("insertion outside the basis range 0..3");
        if (a == 0) { // fundamental-class insertion kills every positive-degree invariant
            out.zero = true;
            out.factor = Rational(0);
            return out;
        }
        if (a == 1) { // divisor insertion contributes the pairing with the curve class
            out.factor *= Rational(d);
        } else {
            out.key.insertions.push_back(a);
        }
    }
    std::sort(out.key.insertions.begin(), out.key.insertions.end());
    return out;
}

bool grading_admissible(const Model& m, const CorrelatorKey& key) {
    if (key.d < 1) return false;
    long sum = 0;
    for (int a : key.insertions) {
        if (a != 2 && a != 3) return false;
        sum += a - 1;
    }
    return sum == static_cast<long>(key.d) * m.index;
}

std::vector<CorrelatorKey> admissible_keys(const Model& m, int d, int max_insertions) {
    std::vector<CorrelatorKey> out;
    if (d < 1) return out;
    const int target = d * m.index; // s twos and t threes with s + 2t = target
    for (int t = 0; 2 * t <= target; ++t) {
        const int s = target - 2 * t;
        const int n = s + t;
        if (n < 1 || n > max_insertions) continue;
        CorrelatorKey k;
        k.d = d;
        k.insertions.assign(static_cast<std::size_t>(s), 2);
        k.insertions.insert(k.insertions.end(), static_cast<std::size_t>(t), 3);
        out.push_back(std::move(k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void CorrelatorTable::set(const CorrelatorKey& key, Rational value, Provenance prov) {
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        if (it->second.value != value)
            throw VerificationError("conflicting values for invariant " + key_to_string(key) +
                                    ": " + qcw::to_string(it->second.value) + " vs " +
                                    qcw::to_string(value));
        return; // keep the earlier provenance
    }
    entries_.emplace(key, CorrelatorEntry{std::move(value), prov});
}

Rational CorrelatorTable::primitive(const CorrelatorKey& key) const {
    if (!grading_admissible(*model_, key)) return Rational(0);
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw VerificationError("model " + model_->name + " has no value for invariant " +
                                key_to_string(key));
    return it->second.value;
}

Rational CorrelatorTable::evaluate(int d, const std::vector<int>& insertions) const {
    NormalizedSymbol ns = normalize_symbol(d, insertions);
    if (ns.zero) return Rational(0);
    if (!grading_admissible(*model_, ns.key)) return Rational(0);
    return ns.factor * primitive(ns.key);
}

namespace {

// One linear constraint sum coeffs * U = rhs over the rationals.
struct Row {
    std::map<int, Rational> coeffs;
    Rational rhs;
};

void row_axpy(Row& r, const Rational& s, const Row& b) {
    // r -= s * b
    for (const auto& [k, v] : b.coeffs) {
        auto it = r.coeffs.find(k);
        if (it == r.coeffs.end()) {
            Rational nv = -s * v;
            if (nv != 0) r.coeffs.emplace(k, std::move(nv));
        } else {
            it->second -= s * v;
            if (it->second == 0) r.coeffs.erase(it);
        }
    }
    r.rhs -= s * b.rhs;
}

// Structural tracker deciding which assembled coefficients are exact.  A
// coefficient is `present` when some admissible invariant can contribute to
// it and `dirty` when a contribution involves an invariant carrying more
// insertions than the reconstruction tracks (i.e. beyond the truncated
// generating potential).  Dirty coefficients are not valid constraints.
// Only admissibility enters, never values, so the mask is deterministic and
// conservative: accidental zeros keep a coefficient marked.
struct Mask {
    bool present = false;
    bool dirty = false;

    Mask() = default;
    explicit Mask(const Rational& c) : present(c != 0) {}

    Mask operator-() const { return *this; }
    Mask& operator+=(const Mask& o) {
        present = present || o.present;
        dirty = dirty || o.dirty;
        return *this;
    }
    friend Mask operator+(Mask a, const Mask& b) { a += b; return a; }
    friend Mask operator*(const Mask& a, const Mask& b) {
        Mask out;
        out.present = a.present && b.present;
        out.dirty = (a.dirty && b.present) || (b.dirty && a.present);
        return out;
    }
    bool operator==(const Mask& o) const { return present == o.present && dirty == o.dirty; }
};

// Constraint quadratic in the unknowns: quad + lin + c0 == 0.
struct QuadRow {
    std::map<std::pair<int, int>, Rational> quad;
    std::map<int, Rational> lin;
    Rational c0;
};

// Exact square root of a nonnegative rational, if it exists.
std::optional<Rational> rational_sqrt(const Rational& x) {
    if (x < 0) return std::nullopt;
    const Integer n = numerator(x), d = denominator(x);
    const Integer sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return Rational(sn) / Rational(sd);
}

// Incremental Gaussian elimination over Q keyed by smallest unknown id,
// with a pool of retained quadratic constraints resolved by fixpoint
// iteration in solve().
class StageSystem {
public:
    explicit StageSystem(int degree) : degree_(degree) {}

    // Adds the constraint e == 0.  Throws VerificationError on contradiction.
    // Constraints quadratic in the unknowns are retained for solve().
    void add(const LinExpr& e) {
        if (e.is_zero()) return;
        for (const auto& [k, v] : e.quadratic_part()) {
            touched_.insert(k.first);
            touched_.insert(k.second);
        }
        for (const auto& [k, v] : e.linear_part()) touched_.insert(k);
        if (!e.is_linear()) {
            ++quads_seen_;
            quads_.push_back(QuadRow{e.quadratic_part(), e.linear_part(), e.constant_part()});
            return;
        }
        ++equations_;
        Row r;
        r.rhs = -e.constant_part();
        for (const auto& [k, v] : e.linear_part()) r.coeffs.emplace(k, v);
        reduce_insert(std::move(r));
    }

    // Resolves the system as far as possible and returns every unknown whose
    // value is pinned uniquely.  The loop alternates three steps until
    // nothing changes: (1) reduced echelon form of the linear rows, reading
    // off fully determined unknowns; (2) substituting the determined values
    // into the retained quadratic rows, feeding rows that become linear back
    // into the elimination; (3) for a single still-free unknown t, expanding
    // quadratic rows whose other unknowns are all affine in t into exact
    // univariate constraints of degree <= 2 and intersecting their rational
    // root sets — a unique common root pins t.  Quadratic rows that end up
    // fully evaluated act as consistency checks; any contradiction or a
    // constraint with no rational root raises VerificationError.
    std::vector<std::pair<int, Rational>> solve() {
        for (;;) {
            finalize();
            bool progress = false;
            for (const auto& [p, r] : basis_)
                if (r.coeffs.size() == 1 && !values_.count(p)) {
                    values_.emplace(p, r.rhs);
                    progress = true;
                }
            if (substitute_into_quads()) progress = true;
            if (progress) continue;
            if (quad_eliminate()) continue;
            break;
        }
        // Whatever quadratic rows survive involve genuinely free unknowns;
        // fully evaluated ones were checked during substitution.
        std::vector<std::pair<int, Rational>> out(values_.begin(), values_.end());
        return out;
    }

    std::size_t equations() const { return equations_; }
    std::size_t independent() const { return basis_.size(); }
    std::size_t touched() const { return touched_.size(); }
    std::size_t quadratic() const { return quads_seen_; }
    std::size_t closed() const { return closed_; }

private:
    void reduce_insert(Row r) {
        while (!r.coeffs.empty()) {
            const int p = r.coeffs.begin()->first;
            auto it = basis_.find(p);
            if (it == basis_.end()) {
                const Rational lead = r.coeffs.begin()->second;
                for (auto& [k, v] : r.coeffs) v /= lead;
                r.rhs /= lead;
                basis_.emplace(p, std::move(r));
                return;
            }
            const Rational s = r.coeffs.begin()->second; // copy: row_axpy edits r.coeffs
            row_axpy(r, s, it->second);
        }
        if (r.rhs != 0) throw inconsistent();
    }

    // Back-substitution to reduced echelon form.
    void finalize() {
        for (auto it = basis_.rbegin(); it != basis_.rend(); ++it) {
            Row& r = it->second;
            std::vector<std::pair<int, Rational>> todo;
            for (const auto& [k, v] : r.coeffs)
                if (k != it->first && basis_.count(k)) todo.emplace_back(k, v);
            for (const auto& [k, v] : todo) row_axpy(r, v, basis_.at(k));
        }
    }

    // Replaces determined unknowns by their values inside the quadratic
    // rows.  Rows whose quadratic part empties are moved into the linear
    // elimination (or, if fully constant, checked for consistency).
    // Returns whether any row changed category.
    bool substitute_into_quads() {
        bool progress = false;
        std::vector<QuadRow> keep;
        for (QuadRow& qr : quads_) {
            QuadRow next;
            next.c0 = qr.c0;
            next.lin = std::move(qr.lin);
            for (const auto& [k, c] : qr.quad) {
                auto vi = values_.find(k.first);
                auto vj = values_.find(k.second);
                if (vi != values_.end() && vj != values_.end()) {
                    next.c0 += c * vi->second * vj->second;
                } else if (vi != values_.end()) {
                    add_into(next.lin, k.second, c * vi->second);
                } else if (vj != values_.end()) {
                    add_into(next.lin, k.first, c * vj->second);
                } else {
                    next.quad.emplace(k, c);
                }
            }
            for (auto it = next.lin.begin(); it != next.lin.end();) {
                auto vi = values_.find(it->first);
                if (vi != values_.end()) {
                    next.c0 += it->second * vi->second;
                    it = next.lin.erase(it);
                } else {
                    ++it;
                }
            }
            if (!next.quad.empty()) {
                keep.push_back(std::move(next));
                continue;
            }
            progress = true;
            if (next.lin.empty()) {
                if (next.c0 != 0) throw inconsistent();
                continue; // consumed as a consistency check
            }
            ++equations_;
            Row r;
            r.rhs = -next.c0;
            r.coeffs = std::move(next.lin);
            reduce_insert(std::move(r));
        }
        quads_ = std::move(keep);
        return progress;
    }

    // Step (3): rewrite the quadratic rows as exact polynomials of degree
    // <= 2 in the free unknowns (every pivot row of the reduced echelon
    // form is affine in the free unknowns, so this is a substitution, not
    // an approximation) and eliminate with the degree-2 monomials as
    // preferred pivots.  Rows that shed all their degree-2 monomials are
    // genuine linear relations the linear pass could not see and are fed
    // back; rows supported on {t, t^2} for a single unknown t are solved
    // exactly over the rationals, intersecting root sets across rows.
    bool quad_eliminate() {
        if (quads_.empty()) return false;

        // Monomial coordinates: (0,i,j) for t_i t_j (i <= j), (1,k,0) for
        // t_k.  Map ordering makes degree-2 monomials the preferred pivots.
        using MKey = std::tuple<int, int, int>;
        struct LRow {
            std::map<MKey, Rational> coeffs;
            Rational c0;
        };

        // Affine form of an unknown in the free unknowns: const + sum c_f t_f.
        auto affine = [&](int id) -> std::pair<Rational, std::map<int, Rational>> {
            auto vi = values_.find(id);
            if (vi != values_.end()) return {vi->second, {}};
            auto it = basis_.find(id);
            if (it == basis_.end()) return {Rational(0), {{id, Rational(1)}}};
            std::map<int, Rational> lin;
            for (const auto& [k, v] : it->second.coeffs)
                if (k != id) lin.emplace(k, -v);
            return {it->second.rhs, std::move(lin)};
        };

        std::map<MKey, LRow> lbasis;
        auto lrow_insert = [&](LRow r) {
            while (!r.coeffs.empty()) {
                const MKey p = r.coeffs.begin()->first;
                auto it = lbasis.find(p);
                if (it == lbasis.end()) {
                    const Rational lead = r.coeffs.begin()->second;
                    for (auto& [k, v] : r.coeffs) v /= lead;
                    r.c0 /= lead;
                    lbasis.emplace(p, std::move(r));
                    return;
                }
                const Rational s = r.coeffs.begin()->second;
                for (const auto& [k, v] : it->second.coeffs) {
                    auto jt = r.coeffs.find(k);
                    if (jt == r.coeffs.end()) {
                        Rational nv = -s * v;
                        if (nv != 0) r.coeffs.emplace(k, std::move(nv));
                    } else {
                        jt->second -= s * v;
                        if (jt->second == 0) r.coeffs.erase(jt);
                    }
                }
                r.c0 -= s * it->second.c0;
            }
            if (r.c0 != 0) throw inconsistent();
        };

        for (const QuadRow& qr : quads_) {
            LRow r;
            r.c0 = qr.c0;
            auto add_mono = [&](MKey k, const Rational& v) {
                if (v == 0) return;
                auto it = r.coeffs.find(k);
                if (it == r.coeffs.end()) {
                    r.coeffs.emplace(k, v);
                } else {
                    it->second += v;
                    if (it->second == 0) r.coeffs.erase(it);
                }
            };
            for (const auto& [k, v] : qr.lin) {
                auto [c, lin] = affine(k);
                r.c0 += v * c;
                for (const auto& [f, cf] : lin) add_mono({1, f, 0}, v * cf);
            }
            for (const auto& [k, v] : qr.quad) {
                auto [ci, li] = affine(k.first);
                auto [cj, lj] = affine(k.second);
                r.c0 += v * ci * cj;
                for (const auto& [f, cf] : li) add_mono({1, f, 0}, v * cf * cj);
                for (const auto& [f, cf] : lj) add_mono({1, f, 0}, v * cf * ci);
                for (const auto& [fi, cfi] : li)
                    for (const auto& [fj, cfj] : lj) {
                        MKey mk = fi <= fj ? MKey{0, fi, fj} : MKey{0, fj, fi};
                        add_mono(mk, v * cfi * cfj);
                    }
            }
            lrow_insert(std::move(r));
        }

        // Back-substitution so each surviving row is as sparse as possible.
        for (auto it = lbasis.rbegin(); it != lbasis.rend(); ++it) {
            LRow& r = it->second;
            std::vector<std::pair<MKey, Rational>> todo;
            for (const auto& [k, v] : r.coeffs)
                if (!(k == it->first) && lbasis.count(k)) todo.emplace_back(k, v);
            for (const auto& [k, v] : todo) {
                const LRow& b = lbasis.at(k);
                for (const auto& [bk, bv] : b.coeffs) {
                    auto jt = r.coeffs.find(bk);
                    if (jt == r.coeffs.end()) {
                        Rational nv = -v * bv;
                        if (nv != 0) r.coeffs.emplace(bk, std::move(nv));
                    } else {
                        jt->second -= v * bv;
                        if (jt->second == 0) r.coeffs.erase(jt);
                    }
                }
                r.c0 -= v * b.c0;
            }
        }

        const std::size_t rank_before = basis_.size();
        const std::size_t values_before = values_.size();
        std::map<int, std::set<Rational>> root_sets;
        for (const auto& [pivot, r] : lbasis) {
            bool pure_linear = true;
            int quad_var = -1;
            bool univariate = true;
            for (const auto& [k, v] : r.coeffs) {
                const auto [deg_tag, i, j] = k;
                if (deg_tag == 0) {
                    pure_linear = false;
                    if (i != j || (quad_var >= 0 && quad_var != i)) univariate = false;
                    quad_var = i;
                }
            }
            if (pure_linear) {
                Row lr;
                lr.rhs = -r.c0;
                for (const auto& [k, v] : r.coeffs) lr.coeffs.emplace(std::get<1>(k), v);
                reduce_insert(std::move(lr));
                continue;
            }
            if (!univariate || quad_var < 0) continue;
            // Check the linear support is confined to quad_var as well.
            Rational A = r.c0, B(0), C(0);
            bool usable = true;
            for (const auto& [k, v] : r.coeffs) {
                const auto [deg_tag, i, j] = k;
                if (deg_tag == 0) {
                    C += v;
                } else if (i == quad_var) {
                    B += v;
                } else {
                    usable = false;
                    break;
                }
            }
            if (!usable) continue;
            std::set<Rational> roots;
            const Rational disc = B * B - Rational(4) * A * C;
            std::optional<Rational> s = rational_sqrt(disc);
            if (!s)
                throw VerificationError(
                    "associativity constraints at curve degree " + std::to_string(degree_) +
                    " admit no rational solution with the provided seed values");
            roots.insert((-B + *s) / (Rational(2) * C));
            roots.insert((-B - *s) / (Rational(2) * C));
            auto it = root_sets.find(quad_var);
            if (it == root_sets.end()) {
                root_sets.emplace(quad_var, std::move(roots));
            } else {
                std::set<Rational> inter;
                for (const Rational& x : it->second)
                    if (roots.count(x)) inter.insert(x);
                it->second = std::move(inter);
                if (it->second.empty()) throw inconsistent();
            }
        }
        for (const auto& [t, roots] : root_sets) {
            if (roots.size() != 1) continue;
            if (values_.count(t)) continue;
            const Rational tv = *roots.begin();
            values_.emplace(t, tv);
            ++closed_;
            Row pin;
            pin.coeffs.emplace(t, Rational(1));
            pin.rhs = tv;
            reduce_insert(std::move(pin));
        }
        return basis_.size() > rank_before || values_.size() > values_before;
    }

    VerificationError inconsistent() const {
        return VerificationError(
            "associativity constraints at curve degree " + std::to_string(degree_) +
            " are inconsistent with the provided seed values");
    }

    static void add_into(std::map<int, Rational>& m, int k, Rational v) {
        if (v == 0) return;
        auto it = m.find(k);
        if (it == m.end()) {
            m.emplace(k, std::move(v));
        } else {
            it->second += v;
            if (it->second == 0) m.erase(it);
        }
    }

    int degree_;
    std::map<int, Row> basis_;
    std::vector<QuadRow> quads_;
    std::set<int> touched_;
    std::map<int, Rational> values_;
    std::size_t equations_ = 0;
    std::size_t quads_seen_ = 0;
    std::size_t closed_ = 0;
};

} // namespace

ReconstructReport reconstruct_correlators(const Model& m,
                                          const std::map<CorrelatorKey, Rational>& seeds,
                                          const ReconstructOptions& opt) {
    CorrelatorTable table(m);
    for (const auto& [k, v] : seeds) {
        if (!grading_admissible(m, k))
            throw UsageError("seed key " + key_to_string(k) +
                             " violates the dimension constraint for model " + m.name);
        if (k.d > m.max_curve_degree)
            throw UsageError("seed key " + key_to_string(k) + " exceeds curve degree " +
                             std::to_string(m.max_curve_degree));
        table.set(k, v, Provenance::Seed);
    }

    ReconstructReport rep{std::move(table), {}, {}};

    std::map<CorrelatorKey, int> ids;
    std::vector<CorrelatorKey> id_keys;
    auto id_of = [&](const CorrelatorKey& k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        const int id = static_cast<int>(id_keys.size());
        ids.emplace(k, id);
        id_keys.push_back(k);
        return id;
    };

    const int budget = opt.max_insertions;
    using LPoly = Poly<LinExpr>;

    auto run_stage = [&](int d) {
        // Factor expansions are capped at `budget` jets, but their pairwise
        // products legitimately reach twice that; keep those coefficients,
        // since the exactness mask below decides which ones are usable.
        auto ring = Ring::make({{"q", VarKind::Exponential},
                                {"x2", VarKind::Jet},
                                {"x3", VarKind::Jet}},
                               /*jet_order=*/2 * budget, /*exp_cap=*/d);

        auto lookup = [&](int deg, const std::vector<int>& ins) -> LinExpr {
            NormalizedSymbol ns = normalize_symbol(deg, ins);
            if (ns.zero) return LinExpr();
            if (!grading_admissible(m, ns.key)) return LinExpr();
            if (rep.table.contains(ns.key))
                return LinExpr(ns.factor * rep.table.primitive(ns.key));
            return LinExpr::unknown(id_of(ns.key), ns.factor);
        };

        // All sixteen basis products at this truncation order.
        std::array<std::array<std::vector<LPoly>, 4>, 4> prod;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                prod[a][b] = pair_product<LinExpr>(m, ring, a, b, lookup, d, budget);

        // Parallel symbolic expansion deciding which coefficients of the
        // comparison are exact.  The mask products are taken at the full
        // jet order of the ring, so terms the capped expansion above drops
        // show up here as contributions and poison exactly the coefficients
        // they would have entered; invariants with more insertions than we
        // track are flagged dirty at the source.
        auto mask_lookup = [&](int deg, const std::vector<int>& ins) -> Mask {
            NormalizedSymbol ns = normalize_symbol(deg, ins);
            if (ns.zero) return Mask();
            if (!grading_admissible(m, ns.key)) return Mask();
            Mask mk;
            mk.present = true;
            mk.dirty = ns.key.insertions.size() > static_cast<std::size_t>(budget);
            return mk;
        };
        using MPoly = Poly<Mask>;
        std::array<std::array<std::vector<MPoly>, 4>, 4> mprod;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                mprod[a][b] = pair_product<Mask>(m, ring, a, b, mask_lookup, d, -1);

        StageSystem sys(d);
        for (int a = 1; a <= 3; ++a) {
            for (int b = 1; b <= 3; ++b) {
                for (int c = a; c <= 3; ++c) { // (a,b,c) and (c,b,a) give the same relation
                    for (int j = 0; j < 4; ++j) {
                        LPoly diff = LPoly::zero(ring);
                        MPoly mdiff = MPoly::zero(ring);
                        for (int k = 0; k < 4; ++k) {
                            if (!prod[a][b][k].is_zero() && !prod[k][c][j].is_zero())
                                diff += prod[a][b][k] * prod[k][c][j];
                            if (!prod[b][c][k].is_zero() && !prod[a][k][j].is_zero())
                                diff -= prod[b][c][k] * prod[a][k][j];
                            // Both association orders contribute presence; a
                            // dirty term on either side disqualifies the
                            // coefficient, so the mask adds rather than
                            // cancels.
                            mdiff += mprod[a][b][k] * mprod[k][c][j];
                            mdiff += mprod[b][c][k] * mprod[a][k][j];
                        }
                        for (const auto& [mono, e] : diff.terms()) {
                            if (mdiff.coefficient(mono).dirty) continue;
                            sys.add(e);
                        }
                    }
                }
            }
        }
        const auto values = sys.solve();

        StageDiagnostics diag;
        diag.degree = d;
        diag.unknowns = sys.touched();
        diag.equations = sys.equations();
        diag.independent = sys.independent();
        diag.quadratic = sys.quadratic();
        diag.closed = sys.closed();
        for (const auto& [id, value] : values) {
            const CorrelatorKey& key = id_keys[static_cast<std::size_t>(id)];
            rep.table.set(key, value, Provenance::Reconstructed); // checks consistency if present
            ++diag.solved;
        }
        rep.stages.push_back(diag);
    };

    auto missing_keys = [&]() {
        std::vector<CorrelatorKey> out;
        for (int d = 1; d <= m.max_curve_degree; ++d)
            for (const auto& key : admissible_keys(m, d, opt.max_insertions))
                if (!rep.table.contains(key)) out.push_back(key);
        return out;
    };

    for (int d = 1; d <= m.max_curve_degree; ++d) run_stage(d);

    // Invariants of degree beyond max_curve_degree carry more insertions
    // than we track, so later stages contribute equations without new
    // unknowns.  When sparse seeds leave a residual solution family, those
    // pure-constraint stages cut it down; stop as soon as nothing is
    // missing (seed sets that pin everything early never enter this loop).
    for (int d = m.max_curve_degree + 1;
         d <= 2 * m.max_curve_degree && !missing_keys().empty(); ++d)
        run_stage(d);

    std::vector<CorrelatorKey> open_core;
    for (const auto& key : missing_keys()) {
        if (key.insertions.size() <= 4) open_core.push_back(key);
        rep.undetermined.push_back(key);
    }
    if (opt.strict && !open_core.empty()) {
        std::string list;
        for (std::size_t i = 0; i < open_core.size(); ++i) {
            if (i) list += ", ";
            list += key_to_string(open_core[i]);
        }
        throw VerificationError("seeds underdetermine model " + m.name + "; " +
                                std::to_string(open_core.size()) +
                                " invariant(s) left open: " + list);
    }
    return rep;
}

std::string default_seed_path() { return std::string(QCW_DATA_DIR) + "/correlator_seeds.json"; }

std::map<CorrelatorKey, Rational> load_seeds(const std::string& path, const Model& m) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open seed file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw UsageError("seed file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.contains("models") || !doc["models"].is_object())
        throw UsageError("seed file '" + path + "' has no \"models\" object");
    const auto& models = doc["models"];
    if (!models.contains(m.name))
        throw UsageError("seed file '" + path + "' has no entry for model " + m.name);
    const auto& entry = models[m.name];
    if (!entry.contains("seeds") || !entry["seeds"].is_object())
        throw UsageError("seed file '" + path + "': model " + m.name +
                         " has no \"seeds\" object");
    std::map<CorrelatorKey, Rational> out;
    for (const auto& [k, v] : entry["seeds"].items()) {
        if (!v.is_string())
            throw UsageError("seed file '" + path + "': value of " + k +
                             " must be a string holding an integer or fraction");
        CorrelatorKey key = key_from_string(k);
        if (out.count(key))
            throw UsageError("seed file '" + path + "': duplicate key " + key_to_string(key));
        out.emplace(std::move(key), parse_rational(v.get<std::string>()));
    }
    return out;
}

std::map<CorrelatorKey, Rational> default_seeds(const Model& m) {
    return load_seeds(default_seed_path(), m);
}

} // namespace qcw::fano
