#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vekua/exact.hpp"

namespace vekua {

/// Product group T^d x SU(2)^k.
struct GroupSpec {
    int torus_dim = 0;
    int su2_count = 0;

    GroupSpec() = default;
    GroupSpec(int d, int k) : torus_dim(d), su2_count(k) {
        if (d < 0 || k < 0 || d + k == 0) throw std::invalid_argument("group needs d >= 0, k >= 0, d + k > 0");
    }

    bool operator==(const GroupSpec& o) const {
        return torus_dim == o.torus_dim && su2_count == o.su2_count;
    }
    bool operator!=(const GroupSpec& o) const { return !(*this == o); }

    std::string to_string() const {
        return "T^" + std::to_string(torus_dim) + " x SU(2)^" + std::to_string(su2_count);
    }
};

/// Irreducible representation: torus characters tau in Z^d and SU(2) spins
/// stored doubled (twice_ells[j] = 2*l_j) so half-integers stay integral.
struct RepIndex {
    std::vector<std::int64_t> taus;
    std::vector<std::int64_t> twice_ells;

    bool operator==(const RepIndex& o) const { return taus == o.taus && twice_ells == o.twice_ells; }
    bool operator!=(const RepIndex& o) const { return !(*this == o); }
    bool operator<(const RepIndex& o) const {
        if (taus != o.taus) return taus < o.taus;
        return twice_ells < o.twice_ells;
    }

    std::string to_string() const {
        std::string s = "rep(tau=[";
        for (size_t i = 0; i < taus.size(); ++i) s += (i ? "," : "") + std::to_string(taus[i]);
        s += "], 2l=[";
        for (size_t i = 0; i < twice_ells.size(); ++i) s += (i ? "," : "") + std::to_string(twice_ells[i]);
        return s + "])";
    }
};

/// Matrix-coefficient position inside a representation: row index m and
/// column index n per SU(2) factor, both doubled. Torus factors contribute
/// no slot indices beyond the character itself.
struct Slot {
    RepIndex rep;
    std::vector<std::int64_t> twice_ms;
    std::vector<std::int64_t> twice_ns;

    bool operator==(const Slot& o) const {
        return rep == o.rep && twice_ms == o.twice_ms && twice_ns == o.twice_ns;
    }
    bool operator!=(const Slot& o) const { return !(*this == o); }
    bool operator<(const Slot& o) const {
        if (rep != o.rep) return rep < o.rep;
        if (twice_ms != o.twice_ms) return twice_ms < o.twice_ms;
        return twice_ns < o.twice_ns;
    }

    std::string to_string() const {
        std::string s = rep.to_string() + " slot(2m=[";
        for (size_t i = 0; i < twice_ms.size(); ++i) s += (i ? "," : "") + std::to_string(twice_ms[i]);
        s += "], 2n=[";
        for (size_t i = 0; i < twice_ns.size(); ++i) s += (i ? "," : "") + std::to_string(twice_ns[i]);
        return s + "])";
    }
};

inline void validate_rep(const GroupSpec& g, const RepIndex& rep) {
    if ((int)rep.taus.size() != g.torus_dim || (int)rep.twice_ells.size() != g.su2_count)
        throw std::invalid_argument("rep index does not match group shape");
    for (auto t : rep.twice_ells)
        if (t < 0) throw std::invalid_argument("negative spin");
}

inline void validate_slot(const GroupSpec& g, const Slot& s) {
    validate_rep(g, s.rep);
    if (s.twice_ms.size() != s.rep.twice_ells.size() || s.twice_ns.size() != s.rep.twice_ells.size())
        throw std::invalid_argument("slot index does not match rep shape");
    for (size_t j = 0; j < s.rep.twice_ells.size(); ++j) {
        std::int64_t t = s.rep.twice_ells[j];
        for (std::int64_t v : {s.twice_ms[j], s.twice_ns[j]}) {
            if (v < -t || v > t) throw std::invalid_argument("slot index outside [-l, l]");
            if (((v - t) & 1) != 0) throw std::invalid_argument("slot index parity mismatch");
        }
    }
}

/// <xi>^2 = 1 + sum tau_i^2 + sum l_j(l_j + 1), exact.
inline Rational weight_squared(const RepIndex& rep) {
    Rational w(1);
    for (auto t : rep.taus) w += Rational(Int128(t) * t);
    for (auto tl : rep.twice_ells) w += Rational(Int128(tl) * (tl + 2), 4);
    return w;
}

inline std::int64_t rep_dimension(const RepIndex& rep) {
    std::int64_t d = 1;
    for (auto tl : rep.twice_ells) d *= tl + 1;
    return d;
}

/// All reps with <xi> <= xi_max, sorted by (weight^2, taus, twice_ells).
inline std::vector<RepIndex> enumerate_reps(const GroupSpec& g, const Rational& xi_max) {
    std::vector<RepIndex> out;
    Rational budget = xi_max * xi_max - Rational(1);
    if (budget.sign() < 0) return out;

    RepIndex cur;
    cur.taus.resize(g.torus_dim);
    cur.twice_ells.resize(g.su2_count);

    std::function<void(int, Rational)> rec = [&](int pos, Rational left) {
        if (pos == g.torus_dim + g.su2_count) {
            out.push_back(cur);
            return;
        }
        if (pos < g.torus_dim) {
            std::int64_t tmax = (std::int64_t)isqrt128(left.num() / left.den());
            for (std::int64_t t = -tmax; t <= tmax; ++t) {
                cur.taus[pos] = t;
                rec(pos + 1, left - Rational(Int128(t) * t));
            }
        } else {
            int j = pos - g.torus_dim;
            for (std::int64_t tl = 0;; ++tl) {
                Rational cas(Int128(tl) * (tl + 2), 4);
                if (cas > left) break;
                cur.twice_ells[j] = tl;
                rec(pos + 1, left - cas);
            }
        }
    };
    rec(0, budget);

    std::vector<std::pair<Rational, size_t>> order(out.size());
    for (size_t i = 0; i < out.size(); ++i) order[i] = {weight_squared(out[i]), i};
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const RepIndex &ra = out[a.second], &rb = out[b.second];
        if (ra.taus != rb.taus) return ra.taus < rb.taus;
        return ra.twice_ells < rb.twice_ells;
    });
    std::vector<RepIndex> sorted;
    sorted.reserve(out.size());
    for (const auto& [w, i] : order) sorted.push_back(std::move(out[i]));
    return sorted;
}

/// Visit every row multi-index (twice_ms) of the rep in odometer order.
template <typename F>
void for_each_m(const RepIndex& rep, F&& fn) {
    size_t k = rep.twice_ells.size();
    std::vector<std::int64_t> m(k);
    for (size_t j = 0; j < k; ++j) m[j] = -rep.twice_ells[j];
    while (true) {
        fn(m);
        size_t j = 0;
        for (; j < k; ++j) {
            if (m[j] + 2 <= rep.twice_ells[j]) {
                m[j] += 2;
                for (size_t i = 0; i < j; ++i) m[i] = -rep.twice_ells[i];
                break;
            }
        }
        if (j == k) break;
    }
}

/// Row-major flat position of a row/column multi-index; factor 0 varies fastest.
inline std::int64_t flat_index(const RepIndex& rep, const std::vector<std::int64_t>& twice_v) {
    std::int64_t idx = 0, stride = 1;
    for (size_t j = 0; j < rep.twice_ells.size(); ++j) {
        idx += stride * ((twice_v[j] + rep.twice_ells[j]) / 2);
        stride *= rep.twice_ells[j] + 1;
    }
    return idx;
}

/// Left-invariant real vector field X = sum c_i d/dx_i + sum a_j D_0^(j),
/// one coefficient per torus factor / SU(2) factor. Coefficients may carry a
/// continued-fraction descriptor instead of a closed form.
struct VectorFieldSpec {
    std::vector<ExactReal> torus_coeffs;
    std::vector<ExactReal> su2_coeffs;

    bool has_cf() const {
        for (const auto& c : torus_coeffs)
            if (c.is_cf()) return true;
        for (const auto& c : su2_coeffs)
            if (c.is_cf()) return true;
        return false;
    }

    bool all_rational() const {
        for (const auto& c : torus_coeffs)
            if (c.is_cf() || !c.is_rational()) return false;
        for (const auto& c : su2_coeffs)
            if (c.is_cf() || !c.is_rational()) return false;
        return true;
    }

    VectorFieldSpec negated() const {
        VectorFieldSpec out;
        for (const auto& c : torus_coeffs) out.torus_coeffs.push_back(-c);
        for (const auto& c : su2_coeffs) out.su2_coeffs.push_back(-c);
        return out;
    }
};

inline void validate_vector_field(const GroupSpec& g, const VectorFieldSpec& vf) {
    if ((int)vf.torus_coeffs.size() != g.torus_dim || (int)vf.su2_coeffs.size() != g.su2_count)
        throw std::invalid_argument("vector field does not match group shape");
}

/// Symbol value lambda = sum c_i tau_i + sum a_j m_j at a slot. When every
/// contributing coefficient is exact the closed form is present; a CF
/// coefficient multiplied by a nonzero index leaves only the enclosure.
struct LambdaEval {
    std::optional<ExactReal> exact;
    RatInterval enclosure;

    bool is_exact() const { return exact.has_value(); }
    double to_double() const {
        if (exact) return exact->to_double();
        return (enclosure.lo.to_double() + enclosure.hi.to_double()) / 2;
    }
};

inline LambdaEval lambda(const VectorFieldSpec& vf, const Slot& slot) {
    ExactReal exact_sum(0);
    RatInterval cf_sum{Rational(0)};
    bool has_cf_term = false;

    for (size_t i = 0; i < vf.torus_coeffs.size(); ++i) {
        std::int64_t t = slot.rep.taus[i];
        if (t == 0) continue;
        const ExactReal& c = vf.torus_coeffs[i];
        if (c.is_cf()) {
            has_cf_term = true;
            cf_sum = cf_sum + RatInterval(Rational(t)) * c.cf().enclosure();
        } else {
            exact_sum += ExactReal(Rational(t)) * c;
        }
    }
    for (size_t j = 0; j < vf.su2_coeffs.size(); ++j) {
        Rational m(slot.twice_ms[j], 2);
        if (m.is_zero()) continue;
        const ExactReal& a = vf.su2_coeffs[j];
        if (a.is_cf()) {
            has_cf_term = true;
            cf_sum = cf_sum + RatInterval(m) * a.cf().enclosure();
        } else {
            exact_sum += ExactReal(m) * a;
        }
    }

    LambdaEval out;
    if (!has_cf_term) {
        out.exact = exact_sum;
        out.enclosure = exact_sum.to_interval();
    } else {
        out.enclosure = exact_sum.to_interval() + cf_sum;
    }
    return out;
}

inline RepIndex conjugate_rep(const RepIndex& rep) {
    RepIndex out = rep;
    for (auto& t : out.taus) t = -t;
    return out;
}

/// The conjugate matrix coefficient lives at negated indices with the phase
/// prod_j (-1)^(m_j - n_j). Applying it twice is the identity with phase +1.
struct ConjugateSlot {
    Slot slot;
    int phase;
};

inline ConjugateSlot conjugate_slot(const Slot& s) {
    ConjugateSlot out;
    out.slot.rep = conjugate_rep(s.rep);
    out.slot.twice_ms = s.twice_ms;
    out.slot.twice_ns = s.twice_ns;
    int neg = 0;
    for (size_t j = 0; j < s.twice_ms.size(); ++j) {
        out.slot.twice_ms[j] = -s.twice_ms[j];
        out.slot.twice_ns[j] = -s.twice_ns[j];
        neg += int(((s.twice_ms[j] - s.twice_ns[j]) / 2) & 1);
    }
    out.phase = (neg & 1) ? -1 : 1;
    return out;
}

inline bool is_self_dual(const Slot& s) { return conjugate_slot(s).slot == s; }

/// Zigzag order on signed indices: 0 < 1 < -1 < 2 < -2 < ... This is the
/// order in which the canonical solver branch picks the zeroed side of a
/// singular conjugate pair.
inline std::uint64_t zigzag(std::int64_t v) {
    return v > 0 ? std::uint64_t(2 * v - 1) : std::uint64_t(-2 * v);
}

inline bool slot_zigzag_less(const Slot& a, const Slot& b) {
    for (size_t i = 0; i < a.rep.taus.size(); ++i)
        if (a.rep.taus[i] != b.rep.taus[i]) return zigzag(a.rep.taus[i]) < zigzag(b.rep.taus[i]);
    for (size_t j = 0; j < a.twice_ms.size(); ++j)
        if (a.twice_ms[j] != b.twice_ms[j]) return zigzag(a.twice_ms[j]) < zigzag(b.twice_ms[j]);
    for (size_t j = 0; j < a.twice_ns.size(); ++j)
        if (a.twice_ns[j] != b.twice_ns[j]) return zigzag(a.twice_ns[j]) < zigzag(b.twice_ns[j]);
    return false;
}

} // namespace vekua
