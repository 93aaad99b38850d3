#include "qcw/dp/lattice.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qcw::dp {

namespace {

void require_same_rank(const LatticeVector& x, const LatticeVector& y) {
    if (x.rank() != y.rank())
        throw AlgebraError("lattice vectors of different rank");
}

}  // namespace

LatticeVector& LatticeVector::operator+=(const LatticeVector& o) {
    require_same_rank(*this, o);
    a += o.a;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += o.b[i];
    return *this;
}

LatticeVector& LatticeVector::operator-=(const LatticeVector& o) {
    require_same_rank(*this, o);
    a -= o.a;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= o.b[i];
    return *this;
}

LatticeVector operator*(long c, LatticeVector x) {
    x.a *= c;
    for (long& e : x.b) e *= c;
    return x;
}

LatticeVector operator-(LatticeVector x) { return -1L * std::move(x); }

std::string to_string(const LatticeVector& v) {
    std::ostringstream out;
    out << '(' << v.a << ';';
    for (std::size_t i = 0; i < v.b.size(); ++i) {
        if (i) out << ',';
        out << v.b[i];
    }
    out << ')';
    return out.str();
}

LatticeVector parse_lattice_vector(const std::string& s) {
    if (s.size() < 4 || s.front() != '(' || s.back() != ')')
        throw UsageError("malformed lattice vector: " + s);
    const std::size_t semi = s.find(';');
    if (semi == std::string::npos)
        throw UsageError("malformed lattice vector: " + s);
    LatticeVector v;
    try {
        v.a = std::stol(s.substr(1, semi - 1));
        std::string tail = s.substr(semi + 1, s.size() - semi - 2);
        if (!tail.empty()) {
            std::istringstream in(tail);
            std::string item;
            while (std::getline(in, item, ',')) v.b.push_back(std::stol(item));
        }
    } catch (const std::logic_error&) {
        throw UsageError("malformed lattice vector: " + s);
    }
    return v;
}

long pairing(const LatticeVector& x, const LatticeVector& y) {
    require_same_rank(x, y);
    long acc = x.a * y.a;
    for (std::size_t i = 0; i < x.b.size(); ++i) acc -= x.b[i] * y.b[i];
    return acc;
}

long degree(const LatticeVector& x) {
    long acc = 3 * x.a;
    for (long e : x.b) acc -= e;
    return acc;
}

long self_intersection(const LatticeVector& x) { return pairing(x, x); }

LatticeVector canonical_class(std::size_t r) {
    return LatticeVector(3, std::vector<long>(r, 1));
}

LatticeVector line_class(std::size_t r) {
    return LatticeVector(1, std::vector<long>(r, 0));
}

LatticeVector exceptional_class(std::size_t r, std::size_t i) {
    if (i < 1 || i > r) throw AlgebraError("exceptional index out of range");
    LatticeVector v(0, std::vector<long>(r, 0));
    v.b[i - 1] = -1;
    return v;
}

bool is_root(const LatticeVector& v) {
    return degree(v) == 0 && self_intersection(v) == -2;
}

LatticeVector cremona_reflect(const LatticeVector& v, std::size_t i,
                              std::size_t j, std::size_t k) {
    if (i == j || j == k || i == k)
        throw AlgebraError("reflection indices must be distinct");
    if (i < 1 || j < 1 || k < 1 || i > v.rank() || j > v.rank() || k > v.rank())
        throw AlgebraError("reflection index out of range");
    LatticeVector out = v;
    const long delta = v.a - v.b[i - 1] - v.b[j - 1] - v.b[k - 1];
    out.a += delta;
    out.b[i - 1] += delta;
    out.b[j - 1] += delta;
    out.b[k - 1] += delta;
    return out;
}

LatticeVector transpose_entries(const LatticeVector& v, std::size_t i,
                                std::size_t j) {
    if (i < 1 || j < 1 || i > v.rank() || j > v.rank())
        throw AlgebraError("transposition index out of range");
    LatticeVector out = v;
    std::swap(out.b[i - 1], out.b[j - 1]);
    return out;
}

LatticeVector root_reflect(const LatticeVector& v, const LatticeVector& root) {
    if (!is_root(root)) throw AlgebraError("reflection vector is not a root");
    return v + pairing(v, root) * root;
}

// ---------------------------------------------------------------------------
// Normal-form reduction
// ---------------------------------------------------------------------------

namespace {

// The complete list of nonvanishing normal forms (trailing zeros dropped).
// These shapes are algorithm data (they define the classification); the
// invariant values attached to them live in the versioned data file, whose
// loader cross-checks that its keys are exactly this list.
const std::vector<LatticeVector>& supported_forms() {
    static const std::vector<LatticeVector> forms = {
        LatticeVector(0, {-1}),
        LatticeVector(1, {}),
        LatticeVector(1, {1}),
        LatticeVector(3, {1, 1, 1, 1, 1, 1}),
        LatticeVector(3, {1, 1, 1, 1, 1, 1, 1}),
        LatticeVector(3, {1, 1, 1, 1, 1, 1, 1, 1}),
        LatticeVector(4, {2, 1, 1, 1, 1, 1, 1, 1}),
        LatticeVector(6, {2, 2, 2, 2, 2, 2, 2, 1}),
        LatticeVector(6, {2, 2, 2, 2, 2, 2, 2, 2}),
        LatticeVector(9, {3, 3, 3, 3, 3, 3, 3, 3}),
    };
    return forms;
}

// Matches (a, multiset of nonzero b-entries) against a stored form.
bool matches_form(const LatticeVector& reduced, const LatticeVector& form) {
    if (reduced.a != form.a) return false;
    std::vector<long> nz;
    for (long e : reduced.b)
        if (e != 0) nz.push_back(e);
    if (nz.size() != form.b.size()) return false;
    std::vector<long> want = form.b;
    std::sort(nz.begin(), nz.end());
    std::sort(want.begin(), want.end());
    return nz == want;
}

const LatticeVector* match_supported(const LatticeVector& reduced) {
    for (const LatticeVector& form : supported_forms())
        if (matches_form(reduced, form)) return &form;
    return nullptr;
}

LatticeVector pad_form(const LatticeVector& form, std::size_t r) {
    LatticeVector out = form;
    if (out.b.size() > r)
        throw AlgebraError("normal form does not fit the requested rank");
    out.b.resize(r, 0);
    return out;
}

}  // namespace

ReducedForm weyl_reduce(const LatticeVector& v) {
    if (v.rank() < 3)
        throw AlgebraError("normal-form reduction needs rank at least 3");
    LatticeVector w = v;
    std::size_t steps = 0;
    const std::size_t cap = static_cast<std::size_t>(std::max(w.a, 0L)) + 4;
    for (;;) {
        std::sort(w.b.begin(), w.b.end(), std::greater<long>());
        if (w.a < 0) break;
        const long delta = w.a - w.b[0] - w.b[1] - w.b[2];
        if (delta >= 0) break;
        w = cremona_reflect(w, 1, 2, 3);
        if (++steps > cap)
            throw AlgebraError("normal-form reduction exceeded its step bound");
    }
    ReducedForm out;
    out.steps = steps;
    if (const LatticeVector* form = match_supported(w)) {
        out.status = SupportStatus::Supported;
        out.normal_form = pad_form(*form, v.rank());
    } else {
        out.status = SupportStatus::Vanishing;
        out.normal_form = w;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbit enumeration
// ---------------------------------------------------------------------------

bool OrbitSet::contains(const LatticeVector& v) const {
    return std::binary_search(elements.begin(), elements.end(), v);
}

OrbitSet enumerate_orbit(std::size_t r, const LatticeVector& seed,
                         std::string label, std::size_t cap) {
    if (r < 3 || r > 8) throw AlgebraError("rank out of range [3,8]");
    if (seed.rank() != r) throw AlgebraError("seed rank mismatch");
    std::set<LatticeVector> seen{seed};
    std::deque<const LatticeVector*> frontier{&*seen.begin()};
    while (!frontier.empty()) {
        const LatticeVector v = *frontier.front();
        frontier.pop_front();
        std::vector<LatticeVector> next;
        next.reserve(r);
        for (std::size_t i = 1; i < r; ++i)
            next.push_back(transpose_entries(v, i, i + 1));
        next.push_back(cremona_reflect(v, 1, 2, 3));
        for (LatticeVector& n : next) {
            auto [it, inserted] = seen.insert(std::move(n));
            if (inserted) {
                if (seen.size() > cap)
                    throw AlgebraError("orbit exceeded its size cap (wrong seed?)");
                frontier.push_back(&*it);
            }
        }
    }
    OrbitSet out;
    out.r = r;
    out.representative = seed;
    out.elements.assign(seen.begin(), seen.end());
    out.label = std::move(label);
    return out;
}

namespace {

std::size_t rank_index(std::size_t r) {
    if (r < 3 || r > 8) throw AlgebraError("rank out of range [3,8]");
    return r - 3;
}

OrbitSet labeled_orbit(std::size_t r, LatticeVector seed, const char* label,
                       const std::array<std::size_t, 6>& expected) {
    OrbitSet out = enumerate_orbit(r, std::move(seed), label);
    if (out.elements.size() != expected[rank_index(r)])
        throw VerificationError(std::string("orbit ") + label +
                                " has unexpected cardinality " +
                                std::to_string(out.elements.size()));
    return out;
}

}  // namespace

OrbitSet orbit_I(std::size_t r) {
    return labeled_orbit(r, exceptional_class(r, 1), "I",
                         {6, 10, 16, 27, 56, 240});
}

OrbitSet orbit_F(std::size_t r) {
    LatticeVector seed(1, std::vector<long>(r, 0));
    seed.b[0] = 1;
    return labeled_orbit(r, std::move(seed), "F", {3, 5, 10, 27, 126, 2160});
}

OrbitSet orbit_G(std::size_t r) {
    return labeled_orbit(r, line_class(r), "G", {2, 5, 16, 72, 576, 17280});
}

OrbitSet orbit_H(std::size_t r) {
    LatticeVector seed(0, std::vector<long>(r, 0));
    seed.b[0] = seed.b[1] = -1;
    return labeled_orbit(r, std::move(seed), "H", {6, 30, 80, 216, 756, 6720});
}

OrbitSet roots(std::size_t r) {
    LatticeVector seed(0, std::vector<long>(r, 0));
    seed.b[0] = -1;
    seed.b[1] = 1;
    OrbitSet out = enumerate_orbit(r, seed, "R");
    if (r == 3) {
        // The rank-3 root set is a disjoint union of two orbits: the
        // entry-difference roots and the pair through (1;1,1,1).
        OrbitSet extra = enumerate_orbit(3, LatticeVector(1, {1, 1, 1}), "R");
        std::vector<LatticeVector> merged;
        merged.reserve(out.elements.size() + extra.elements.size());
        std::merge(out.elements.begin(), out.elements.end(),
                   extra.elements.begin(), extra.elements.end(),
                   std::back_inserter(merged));
        out.elements = std::move(merged);
    }
    static const std::array<std::size_t, 6> expected = {8, 20, 40, 72, 126, 240};
    if (out.elements.size() != expected[rank_index(r)])
        throw VerificationError("root set has unexpected cardinality " +
                                std::to_string(out.elements.size()));
    for (const LatticeVector& v : out.elements)
        if (!is_root(v))
            throw VerificationError("root-set element fails the root conditions");
    return out;
}

OrbitSet translate_orbit(const OrbitSet& s, const LatticeVector& t,
                         std::string label) {
    OrbitSet out;
    out.r = s.r;
    out.representative = s.representative + t;
    out.label = std::move(label);
    out.elements.reserve(s.elements.size());
    for (const LatticeVector& v : s.elements) out.elements.push_back(v + t);
    std::sort(out.elements.begin(), out.elements.end());
    return out;
}

std::vector<CardinalityRow> cardinality_grid() {
    std::vector<CardinalityRow> rows;
    unsigned long long weyl = 12;  // rank-3 group order (base case)
    for (std::size_t r = 3; r <= 8; ++r) {
        CardinalityRow row;
        row.r = r;
        row.roots = roots(r).elements.size();
        row.exceptional = orbit_I(r).elements.size();
        row.pencils = orbit_F(r).elements.size();
        row.lines = orbit_G(r).elements.size();
        row.pairs = orbit_H(r).elements.size();
        if (r > 3) weyl *= row.exceptional;  // orbit-stabilizer product
        row.weyl = weyl;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Invariant lookup table
// ---------------------------------------------------------------------------

SupportTable SupportTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open support table: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("cannot parse support table " + path + ": " + e.what());
    }
    SupportTable table;
    try {
        for (const auto& item : doc.at("entries")) {
            SupportEntry entry;
            entry.form = parse_lattice_vector(item.at("form").get<std::string>());
            entry.value = parse_rational(item.at("value").get<std::string>());
            entry.note = item.value("note", "");
            table.entries_.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed support table " + path + ": " + e.what());
    }
    // The file must carry exactly the built-in classification forms, once
    // each, with positive values: the shapes drive weyl_reduce, the file
    // supplies the audited values, and any drift between the two is an error.
    const std::vector<LatticeVector>& forms = supported_forms();
    if (table.entries_.size() != forms.size())
        throw VerificationError("support table entry count mismatch");
    for (const LatticeVector& form : forms) {
        std::size_t hits = 0;
        for (const SupportEntry& entry : table.entries_)
            if (entry.form == form) ++hits;
        if (hits != 1)
            throw VerificationError("support table must list form " +
                                    to_string(form) + " exactly once");
    }
    for (const SupportEntry& entry : table.entries_)
        if (!(entry.value > 0))
            throw VerificationError("support table value for " +
                                    to_string(entry.form) + " must be positive");
    return table;
}

const SupportTable& SupportTable::builtin() {
    static const SupportTable table =
        load(std::string(QCW_DATA_DIR) + "/gw_support_table.json");
    return table;
}

const SupportEntry* SupportTable::find(const LatticeVector& reduced) const {
    for (const SupportEntry& entry : entries_)
        if (matches_form(reduced, entry.form)) return &entry;
    return nullptr;
}

Rational gw_invariant(const SupportTable& table, const LatticeVector& v) {
    const long k = degree(v);
    if (k < 1 || k > 3)
        throw AlgebraError("invariant of degree " + std::to_string(k) +
                           " is not tabulated (only degrees 1,2,3)");
    const ReducedForm reduced = weyl_reduce(v);
    if (reduced.status == SupportStatus::Vanishing) return Rational(0);
    const SupportEntry* entry = table.find(reduced.normal_form);
    if (!entry)
        throw VerificationError("supported normal form missing from table: " +
                                to_string(reduced.normal_form));
    return entry->value;
}

std::vector<SupportPart> support_parts(const SupportTable& table,
                                       std::size_t r, long c) {
    rank_index(r);
    if (c < 1 || c > 3)
        throw AlgebraError("invariant of degree " + std::to_string(c) +
                           " is not tabulated (only degrees 1,2,3)");
    const LatticeVector k = canonical_class(r);
    std::vector<std::pair<std::string, OrbitSet>> pieces;
    auto singleton = [&](const LatticeVector& v) {
        OrbitSet s;
        s.r = r;
        s.representative = v;
        s.elements = {v};
        s.label = "custom";
        return s;
    };
    switch (c) {
        case 1:
            pieces.emplace_back("I", orbit_I(r));
            if (r == 8) pieces.emplace_back("k", singleton(k));
            break;
        case 2:
            pieces.emplace_back("F", orbit_F(r));
            if (r == 7) pieces.emplace_back("k", singleton(k));
            if (r == 8) {
                pieces.emplace_back("I+k", translate_orbit(orbit_I(8), k));
                pieces.emplace_back("2k", singleton(2 * k));
            }
            break;
        case 3:
            pieces.emplace_back("G", orbit_G(r));
            if (r == 6) pieces.emplace_back("k", singleton(k));
            if (r == 7) pieces.emplace_back("I+k", translate_orbit(orbit_I(7), k));
            if (r == 8) {
                pieces.emplace_back("H+k", translate_orbit(orbit_H(8), k));
                pieces.emplace_back("F+k", translate_orbit(orbit_F(8), k));
                pieces.emplace_back("I+2k", translate_orbit(orbit_I(8), 2 * k));
                pieces.emplace_back("3k", singleton(3 * k));
            }
            break;
    }
    std::vector<SupportPart> out;
    std::set<LatticeVector> seen;
    for (auto& [label, orbit] : pieces) {
        const Rational value = gw_invariant(table, orbit.representative);
        if (value == 0)
            throw VerificationError("support part reduced to a vanishing class");
        for (const LatticeVector& beta : orbit.elements) {
            if (degree(beta) != c)
                throw VerificationError("support class of wrong degree: " +
                                        to_string(beta));
            if (gw_invariant(table, beta) != value)
                throw VerificationError(
                    "invariant not constant on the orbit of " +
                    to_string(orbit.representative));
            if (!seen.insert(beta).second)
                throw VerificationError("support parts overlap at " +
                                        to_string(beta));
        }
        out.push_back({label, value, std::move(orbit)});
    }
    return out;
}

std::vector<SupportClass> support_classes(const SupportTable& table,
                                          std::size_t r, long c) {
    std::vector<SupportClass> out;
    for (const SupportPart& part : support_parts(table, r, c))
        for (const LatticeVector& beta : part.orbit.elements)
            out.push_back({beta, part.value});
    std::sort(out.begin(), out.end(),
              [](const SupportClass& x, const SupportClass& y) {
                  return x.beta < y.beta;
              });
    return out;
}

// ---------------------------------------------------------------------------
// Orbit moment sums
// ---------------------------------------------------------------------------

MomentSums orbit_moment_sums(const OrbitSet& S, const LatticeVector& rho,
                             const LatticeVector& rho_perp, bool check_d) {
    if (!is_root(rho) || !is_root(rho_perp))
        throw AlgebraError("moment sums need a pair of roots");
    if (pairing(rho, rho_perp) != 0)
        throw AlgebraError("moment sums need orthogonal roots");
    if (S.elements.empty()) throw AlgebraError("empty orbit");
    const std::size_t r = S.r;
    if (rho.rank() != r || rho_perp.rank() != r)
        throw AlgebraError("root rank mismatch");
    if (check_d && r < 5)
        throw AlgebraError("the quadratic moment closed form needs rank >= 5");

    MomentSums m;
    m.count = static_cast<long long>(S.elements.size());
    const LatticeVector zero(0, std::vector<long>(r, 0));
    m.sum_beta = zero;
    m.sum_rho_beta = zero;
    m.sum_rho2_beta = zero;
    m.sum_cross_beta = zero;
    for (const LatticeVector& beta : S.elements) {
        const long p = pairing(rho, beta);
        const long pp = pairing(rho_perp, beta);
        m.sum_beta += beta;
        m.sum_rho_beta += p * beta;
        m.sum_rho2_beta += (p * p) * beta;
        m.sum_cross_beta += (p * pp) * beta;
        m.q2 += static_cast<long long>(p) * p;
        m.odd_power[0] += p;
        m.odd_power[1] += static_cast<long long>(p) * p * p;
        long long pm = 1;
        for (int e = 0; e < 4; ++e) {
            m.cross_power[e] += pm * pp;
            pm *= p;
        }
    }

    const long deg = degree(S.representative);
    const long denom = 9 - static_cast<long>(r);
    const LatticeVector k = canonical_class(r);

    // (a): sum beta = deg(S) |S| / (9-r) * k_r, compared entrywise in Q.
    const Rational ca = Rational(deg) * Rational(m.count) / Rational(denom);
    m.a_ok = Rational(m.sum_beta.a) == ca * Rational(k.a);
    for (std::size_t i = 0; m.a_ok && i < r; ++i)
        m.a_ok = Rational(m.sum_beta.b[i]) == ca * Rational(k.b[i]);

    // (b): sum (rho,beta) beta = -1/2 q2 * rho.
    const Rational cb = Rational(-m.q2) / 2;
    m.b_ok = Rational(m.sum_rho_beta.a) == cb * Rational(rho.a);
    for (std::size_t i = 0; m.b_ok && i < r; ++i)
        m.b_ok = Rational(m.sum_rho_beta.b[i]) == cb * Rational(rho.b[i]);

    // (c): all odd and mixed scalar sums vanish.
    m.c_ok = m.odd_power[0] == 0 && m.odd_power[1] == 0;
    for (long long cp : m.cross_power) m.c_ok = m.c_ok && cp == 0;

    // (d): sum (rho,beta)^2 beta = deg(S)/(9-r) q2 * k_r (rank >= 5).
    if (check_d) {
        m.d_checked = true;
        const Rational cd = Rational(deg) * Rational(m.q2) / Rational(denom);
        m.d_ok = Rational(m.sum_rho2_beta.a) == cd * Rational(k.a);
        for (std::size_t i = 0; m.d_ok && i < r; ++i)
            m.d_ok = Rational(m.sum_rho2_beta.b[i]) == cd * Rational(k.b[i]);
    }

    // (e): sum (rho,beta)(rho',beta) beta = 0.
    m.e_ok = m.sum_cross_beta == zero;
    return m;
}

std::size_t span_rank(const std::vector<LatticeVector>& vectors) {
    if (vectors.empty()) return 0;
    const std::size_t cols = vectors.front().rank() + 1;
    std::vector<std::vector<Rational>> rows;
    for (const LatticeVector& v : vectors) {
        if (v.rank() + 1 != cols) throw AlgebraError("span of mixed ranks");
        std::vector<Rational> row;
        row.reserve(cols);
        row.push_back(Rational(v.a));
        for (long e : v.b) row.push_back(Rational(e));
        rows.push_back(std::move(row));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            const Rational f = rows[i][col] / rows[rank][col];
            for (std::size_t j = col; j < cols; ++j)
                rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace qcw::dp
