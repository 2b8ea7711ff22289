#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vekua/dual.hpp"

namespace vekua {

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

inline ExactComplex scalar_conj(const ExactComplex& z) { return z.conj(); }
inline std::complex<double> scalar_conj(const std::complex<double>& z) { return std::conj(z); }

inline bool scalar_is_zero(const ExactComplex& z) { return z.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& z) { return z.real() == 0.0 && z.imag() == 0.0; }

inline double scalar_abs(const ExactComplex& z) { return std::sqrt(z.norm_squared().to_double()); }
inline double scalar_abs(const std::complex<double>& z) { return std::abs(z); }

inline double scalar_abs_squared(const ExactComplex& z) { return z.norm_squared().to_double(); }
inline double scalar_abs_squared(const std::complex<double>& z) { return std::norm(z); }

template <typename Scalar>
Scalar scalar_cast(const ExactComplex& z);
template <>
inline ExactComplex scalar_cast<ExactComplex>(const ExactComplex& z) { return z; }
template <>
inline std::complex<double> scalar_cast<std::complex<double>>(const ExactComplex& z) { return z.to_complex(); }

/// Dense d x d coefficient block of one representation, row-major.
template <typename Scalar>
struct RepBlock {
    std::int64_t dim = 0;
    std::vector<Scalar> a;

    explicit RepBlock(std::int64_t d = 0) : dim(d), a(size_t(d) * size_t(d), Scalar{}) {}

    Scalar& at(std::int64_t row, std::int64_t col) { return a[size_t(row) * size_t(dim) + size_t(col)]; }
    const Scalar& at(std::int64_t row, std::int64_t col) const {
        return a[size_t(row) * size_t(dim) + size_t(col)];
    }

    bool all_zero() const {
        for (const auto& v : a)
            if (!scalar_is_zero(v)) return false;
        return true;
    }
};

/// Truncated Fourier coefficient table over the unitary dual. Absent rep
/// blocks denote zero matrices; stored blocks are dense. Scalar is either
/// ExactComplex (exact mode) or std::complex<double> (float mode).
template <typename Scalar>
class FourierData {
public:
    FourierData() = default;
    FourierData(GroupSpec g, Rational xi_max) : group_(g), xi_max_(xi_max) {}

    const GroupSpec& group() const { return group_; }
    const Rational& xi_max() const { return xi_max_; }
    const std::map<RepIndex, RepBlock<Scalar>>& blocks() const { return blocks_; }

    bool has_rep(const RepIndex& rep) const { return blocks_.count(rep) != 0; }

    RepBlock<Scalar>& ensure_block(const RepIndex& rep) {
        auto it = blocks_.find(rep);
        if (it != blocks_.end()) return it->second;
        validate_rep(group_, rep);
        if (weight_squared(rep) > xi_max_ * xi_max_)
            throw std::invalid_argument("rep beyond truncation: " + rep.to_string());
        return blocks_.emplace(rep, RepBlock<Scalar>(rep_dimension(rep))).first->second;
    }

    Scalar get(const Slot& s) const {
        auto it = blocks_.find(s.rep);
        if (it == blocks_.end()) return Scalar{};
        return it->second.at(flat_index(s.rep, s.twice_ms), flat_index(s.rep, s.twice_ns));
    }

    void set(const Slot& s, const Scalar& v) {
        validate_slot(group_, s);
        ensure_block(s.rep).at(flat_index(s.rep, s.twice_ms), flat_index(s.rep, s.twice_ns)) = v;
    }

    /// Visit every stored entry as (slot, value), in deterministic order.
    template <typename F>
    void for_each_entry(F&& fn) const {
        for (const auto& [rep, block] : blocks_) {
            Slot s;
            s.rep = rep;
            for_each_m(rep, [&](const std::vector<std::int64_t>& m) {
                s.twice_ms = m;
                std::int64_t row = flat_index(rep, m);
                for_each_m(rep, [&](const std::vector<std::int64_t>& n) {
                    s.twice_ns = n;
                    fn(s, block.at(row, flat_index(rep, n)));
                });
            });
        }
    }

    bool all_zero() const {
        for (const auto& [rep, block] : blocks_)
            if (!block.all_zero()) return false;
        return true;
    }

private:
    GroupSpec group_;
    Rational xi_max_{0};
    std::map<RepIndex, RepBlock<Scalar>> blocks_;
};

template <typename Scalar>
FourierData<Scalar> data_sub(const FourierData<Scalar>& a, const FourierData<Scalar>& b) {
    if (a.group() != b.group()) throw std::invalid_argument("mismatched groups in data_sub");
    Rational xm = a.xi_max() < b.xi_max() ? b.xi_max() : a.xi_max();
    FourierData<Scalar> out(a.group(), xm);
    for (const auto& [rep, block] : a.blocks()) {
        auto& ob = out.ensure_block(rep);
        for (size_t i = 0; i < block.a.size(); ++i) ob.a[i] = block.a[i];
    }
    for (const auto& [rep, block] : b.blocks()) {
        auto& ob = out.ensure_block(rep);
        for (size_t i = 0; i < block.a.size(); ++i) ob.a[i] = ob.a[i] - block.a[i];
    }
    return out;
}

/// sqrt(sum_xi d_xi sum_mn |entry|^2). The value is a square root, so the
/// result is a double even for exact data; a slotwise all-zero table still
/// reports exactly 0.
template <typename Scalar>
double plancherel_norm(const FourierData<Scalar>& data) {
    double sum = 0;
    for (const auto& [rep, block] : data.blocks()) {
        double d = double(rep_dimension(rep));
        for (const auto& v : block.a) sum += d * scalar_abs_squared(v);
    }
    return std::sqrt(sum);
}

// splitmix64; fixed constants so fixtures are bit-identical everywhere.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + 0x9E3779B97F4A7C15ull)); }

inline std::uint64_t rep_key(std::uint64_t seed, const RepIndex& rep) {
    std::uint64_t h = mix64(seed);
    for (auto t : rep.taus) h = absorb(h, std::uint64_t(t));
    h = absorb(h, 0xABCDull);
    for (auto tl : rep.twice_ells) h = absorb(h, std::uint64_t(tl));
    return h;
}

inline double unit_double(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

/// Dense pseudo-random float-mode data: every entry has magnitude in
/// [1/2, 1] * <xi>^-decay and uniform phase. Keyed per (seed, rep, slot) so
/// the result does not depend on enumeration order.
inline FourierData<std::complex<double>> random_fourier_data(const GroupSpec& group, const Rational& xi_max,
                                                             int decay, std::uint64_t seed) {
    FourierData<std::complex<double>> out(group, xi_max);
    for (const auto& rep : enumerate_reps(group, xi_max)) {
        auto& block = out.ensure_block(rep);
        double scale = std::pow(weight_squared(rep).to_double(), -0.5 * decay);
        std::uint64_t rk = rep_key(seed, rep);
        for (std::int64_t r = 0; r < block.dim; ++r)
            for (std::int64_t c = 0; c < block.dim; ++c) {
                std::uint64_t k = absorb(absorb(rk, std::uint64_t(r)), std::uint64_t(c));
                double mag = scale * (0.5 + 0.5 * unit_double(k));
                double ang = 2 * std::numbers::pi * unit_double(mix64(k));
                block.at(r, c) = std::polar(mag, ang);
            }
    }
    return out;
}

/// Exact-mode companion of random_fourier_data: dyadic entries with
/// numerators in [-64, 64] over denominator 64, no decay scaling.
inline FourierData<ExactComplex> random_fourier_data_exact(const GroupSpec& group, const Rational& xi_max,
                                                           std::uint64_t seed) {
    FourierData<ExactComplex> out(group, xi_max);
    for (const auto& rep : enumerate_reps(group, xi_max)) {
        auto& block = out.ensure_block(rep);
        std::uint64_t rk = rep_key(seed, rep);
        for (std::int64_t r = 0; r < block.dim; ++r)
            for (std::int64_t c = 0; c < block.dim; ++c) {
                std::uint64_t k = absorb(absorb(rk, std::uint64_t(r)), std::uint64_t(c));
                auto dyadic = [](std::uint64_t bits) {
                    return Rational(Int128(bits % 129) - 64, 64);
                };
                block.at(r, c) = ExactComplex(ExactReal(dyadic(k)), ExactReal(dyadic(mix64(k))));
            }
    }
    return out;
}

enum class DecayVerdict { CertifiedNonSmooth, ConsistentWithSmooth, PolynomialOrder, Inconclusive };

inline const char* to_string(DecayVerdict v) {
    switch (v) {
        case DecayVerdict::CertifiedNonSmooth: return "CertifiedNonSmooth";
        case DecayVerdict::ConsistentWithSmooth: return "ConsistentWithSmooth";
        case DecayVerdict::PolynomialOrder: return "PolynomialOrder";
        case DecayVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct DecayReport {
    DecayVerdict verdict = DecayVerdict::Inconclusive;
    double slope = 0;
    int poly_order = 0;
    /// Certified lower bound for |entries| along the witness family (only
    /// with verdict CertifiedNonSmooth).
    double floor = 0;
    int points_used = 0;
    std::string note;
};

/// Log-log decay diagnosis of max-entry magnitude against <xi>, fitted over
/// the top half of the truncation range. A witness family (one slot per rep
/// of an infinite family) whose entries are all nonzero certifies
/// non-smoothness regardless of the fit.
template <typename Scalar>
DecayReport estimate_decay(const FourierData<Scalar>& data,
                           const std::vector<Slot>& witness_family = {}) {
    std::map<Rational, double> max_by_weight;
    for (const auto& [rep, block] : data.blocks()) {
        double mx = 0;
        for (const auto& v : block.a) mx = std::max(mx, scalar_abs(v));
        Rational w2 = weight_squared(rep);
        auto [it, fresh] = max_by_weight.emplace(w2, mx);
        if (!fresh) it->second = std::max(it->second, mx);
    }
    if (max_by_weight.size() < 4)
        throw InsufficientDataError("estimate_decay needs at least 4 distinct weights, got " +
                                    std::to_string(max_by_weight.size()));

    DecayReport rep;

    if (!witness_family.empty()) {
        double floor = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const auto& s : witness_family) {
            double a = scalar_abs(data.get(s));
            if (a == 0) {
                ok = false;
                break;
            }
            floor = std::min(floor, a);
        }
        if (ok) {
            rep.verdict = DecayVerdict::CertifiedNonSmooth;
            rep.floor = floor;
            rep.note = "witness family of " + std::to_string(witness_family.size()) +
                       " slots bounded below by " + std::to_string(floor);
            return rep;
        }
        rep.note = "witness family contains a zero entry; falling back to fit; ";
    }

    // Least squares of log(max magnitude) against log <xi> over the top half.
    Rational top_cut = data.xi_max() * data.xi_max() / Rational(4);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [w2, mx] : max_by_weight)
        if (mx > 0 && w2 >= top_cut) pts.emplace_back(0.5 * std::log(w2.to_double()), std::log(mx));
    if (pts.size() < 4)
        for (const auto& [w2, mx] : max_by_weight)
            if (mx > 0) pts.emplace_back(0.5 * std::log(w2.to_double()), std::log(mx));

    if (pts.empty()) {
        rep.verdict = DecayVerdict::ConsistentWithSmooth;
        rep.slope = -std::numeric_limits<double>::infinity();
        rep.note += "no nonzero entries";
        return rep;
    }
    if (pts.size() < 2) {
        rep.verdict = DecayVerdict::Inconclusive;
        rep.note += "single usable weight";
        return rep;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = double(pts.size());
    double denom = n * sxx - sx * sx;
    rep.points_used = int(pts.size());
    if (denom <= 0) {
        rep.verdict = DecayVerdict::Inconclusive;
        rep.note += "degenerate weight spread";
        return rep;
    }
    rep.slope = (n * sxy - sx * sy) / denom;

    if (rep.slope <= -6)
        rep.verdict = DecayVerdict::ConsistentWithSmooth;
    else if (rep.slope > -1) {
        rep.verdict = DecayVerdict::PolynomialOrder;
        rep.poly_order = std::max(0, int(std::lround(rep.slope)));
    } else {
        rep.verdict = DecayVerdict::Inconclusive;
    }
    return rep;
}

} // namespace vekua
