#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "vekua/coeffs.hpp"
#include "vekua/solve.hpp"

namespace vekua {

inline int thread_count() {
    if (const char* env = std::getenv("VEKUA_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

/// Orbit solve redone from scratch: the conjugate-pair (or fixed-slot)
/// equation written out as a real linear system and eliminated exactly,
/// with none of the closed-form shortcuts the solver uses. This is the
/// reference the solver is tested against.
struct BruteForceResult {
    enum class Status { Unique, SingularConsistent, SingularInconsistent };
    Status status = Status::Unique;
    ExactComplex a;   // value at the primary slot
    ExactComplex b;   // value at the partner slot (paired orbits)
    ExactReal det;    // determinant of the real system
    int nullity = 0;
};

namespace detail {

/// Exact fraction-free elimination (Bareiss) on an augmented system. Row
/// updates divide out the previous pivot, so intermediate entries stay the
/// size of minors of the original system instead of squaring at every level.
/// Returns rank; rows is modified in place to echelon form.
inline int eliminate(std::vector<std::vector<ExactReal>>& rows, ExactReal& det, int n) {
    int rank = 0;
    int sign = 1;
    ExactReal prev(Rational(1));
    for (int col = 0; col < n && rank < n; ++col) {
        int pivot = -1;
        for (int r = rank; r < n && pivot < 0; ++r)
            if (!rows[r][col].is_zero()) pivot = r;
        if (pivot < 0) continue;
        if (pivot != rank) {
            std::swap(rows[pivot], rows[rank]);
            sign = -sign;
        }
        for (int r = rank + 1; r < n; ++r) {
            for (int c = col + 1; c <= n; ++c)
                rows[r][c] = (rows[rank][col] * rows[r][c] - rows[r][col] * rows[rank][c]) / prev;
            rows[r][col] = ExactReal(0);
        }
        prev = rows[rank][col];
        ++rank;
    }
    if (rank < n)
        det = ExactReal(0);
    else
        det = sign < 0 ? -rows[n - 1][n - 1] : rows[n - 1][n - 1];
    return rank;
}

}  // namespace detail

inline BruteForceResult bruteforce_orbit_solve(const OperatorSpec& op, const SlotOrbit& orbit,
                                               const ExactComplex& f1, const ExactComplex& f2) {
    if (!orbit.lam.is_exact())
        throw CFExactnessError("brute-force solve needs an exact symbol value");
    ExactReal l = *orbit.lam.exact;
    ExactReal q1 = op.q.re, q2 = op.q.im;
    ExactReal p1 = op.p.re, p2 = op.p.im;
    ExactReal e(Rational(orbit.phase));

    int n = orbit.fixed() ? 2 : 4;
    std::vector<std::vector<ExactReal>> rows(n, std::vector<ExactReal>(n + 1));
    if (orbit.fixed()) {
        // -q a - p conj(a) = f, unknowns (Re a, Im a).
        rows[0] = {-(q1 + p1), q2 - p2, f1.re};
        rows[1] = {-(q2 + p2), p1 - q1, f1.im};
    } else {
        // (i l - q) a - e p conj(b) = f1, (-i l - q) b - e p conj(a) = f2,
        // unknowns (Re a, Im a, Re b, Im b).
        rows[0] = {-q1, q2 - l, -(e * p1), -(e * p2), f1.re};
        rows[1] = {l - q2, -q1, -(e * p2), e * p1, f1.im};
        rows[2] = {-(e * p1), -(e * p2), -q1, l + q2, f2.re};
        rows[3] = {-(e * p2), e * p1, -(l + q2), -q1, f2.im};
    }

    BruteForceResult out;
    int rank = detail::eliminate(rows, out.det, n);
    out.nullity = n - rank;

    if (rank < n) {
        // Consistency: a zero row of the echelon form with nonzero rhs.
        for (int r = rank; r < n; ++r) {
            bool zero_row = true;
            for (int c = 0; c < n; ++c) zero_row = zero_row && rows[r][c].is_zero();
            if (zero_row && !rows[r][n].is_zero()) {
                out.status = BruteForceResult::Status::SingularInconsistent;
                return out;
            }
        }
        out.status = BruteForceResult::Status::SingularConsistent;
    }

    // Back-substitution, free coordinates pinned to zero.
    std::vector<ExactReal> x(n, ExactReal(0));
    for (int r = rank - 1; r >= 0; --r) {
        int lead = 0;
        while (lead < n && rows[r][lead].is_zero()) ++lead;
        ExactReal acc = rows[r][n];
        for (int c = lead + 1; c < n; ++c) acc -= rows[r][c] * x[c];
        x[lead] = acc / rows[r][lead];
    }
    out.a = ExactComplex(x[0], x[1]);
    if (!orbit.fixed()) out.b = ExactComplex(x[2], x[3]);
    return out;
}

/// Pointwise check of the operator on a uniform torus grid. The derivative
/// term applies an order-8 central difference along the field direction
/// (realized per character, which is the same finite sum reassociated); the
/// zero-order terms q u + p conj(u) are formed pointwise from grid samples.
/// Compares against v, normally the Fourier-side apply of u.
struct GridOracleReport {
    int grid_n = 0;
    double max_abs_error = 0;
    double max_ref = 0;  // max |v| on the grid, for scale
};

inline GridOracleReport torus_grid_apply(const OperatorSpec& op,
                                         const FourierData<std::complex<double>>& u,
                                         const FourierData<std::complex<double>>& v, int grid_n) {
    if (op.group.su2_count != 0 || op.group.torus_dim < 1 || op.group.torus_dim > 2)
        throw std::invalid_argument("grid oracle covers T^1 and T^2 only");
    if (grid_n < 16) throw std::invalid_argument("grid oracle needs at least 16 points per axis");
    const int d = op.group.torus_dim;
    const std::int64_t n = grid_n;

    std::vector<double> field(d);
    for (int i = 0; i < d; ++i) field[i] = op.vf.torus_coeffs[i].to_double();

    struct Term {
        std::int64_t t1 = 0, t2 = 0;
        std::complex<double> cu, cv, mu;  // u coeff, v coeff, FD multiplier
    };
    std::map<std::pair<std::int64_t, std::int64_t>, Term> terms;
    auto key_of = [&](const RepIndex& rep) {
        return std::make_pair(rep.taus[0], d == 2 ? rep.taus[1] : 0);
    };
    u.for_each_entry([&](const Slot& s, const std::complex<double>& val) {
        auto& t = terms[key_of(s.rep)];
        std::tie(t.t1, t.t2) = key_of(s.rep);
        t.cu += val;
    });
    v.for_each_entry([&](const Slot& s, const std::complex<double>& val) {
        auto& t = terms[key_of(s.rep)];
        std::tie(t.t1, t.t2) = key_of(s.rep);
        t.cv += val;
    });

    // Order-8 central difference: antisymmetric weights at offsets 1..4.
    static const double stencil[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    const double h = 2.0 * std::numbers::pi / double(n);
    std::vector<Term> flat;
    flat.reserve(terms.size());
    for (auto& [key, t] : terms) {
        double lam = field[0] * double(t.t1) + (d == 2 ? field[1] * double(t.t2) : 0.0);
        std::complex<double> mu = 0;
        for (int j = 1; j <= 4; ++j)
            mu += stencil[j - 1] * std::complex<double>(0, 2.0 * std::sin(j * h * lam) / h);
        t.mu = mu;
        flat.push_back(t);
    }

    // Base phase table: w[r] = exp(2 pi i r / n).
    std::vector<std::complex<double>> w(n);
    for (std::int64_t r = 0; r < n; ++r)
        w[r] = std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(n));

    const std::int64_t points = d == 2 ? n * n : n;
    std::vector<std::complex<double>> ug(points), dg(points), vg(points);

    auto synth_rows = [&](std::int64_t x0, std::int64_t x1) {
        for (const Term& t : flat) {
            std::int64_t s1 = ((t.t1 % n) + n) % n;
            std::int64_t s2 = ((t.t2 % n) + n) % n;
            if (d == 1) {
                std::int64_t idx = (s1 * x0) % n;
                for (std::int64_t x = x0; x < x1; ++x) {
                    const std::complex<double>& ph = w[idx];
                    ug[x] += t.cu * ph;
                    dg[x] += t.cu * t.mu * ph;
                    vg[x] += t.cv * ph;
                    idx += s1;
                    if (idx >= n) idx -= n;
                }
            } else {
                std::complex<double> cmu = t.cu * t.mu;
                for (std::int64_t x = x0; x < x1; ++x) {
                    std::int64_t idx = (s1 * x + 0) % n;
                    std::complex<double>* urow = ug.data() + x * n;
                    std::complex<double>* drow = dg.data() + x * n;
                    std::complex<double>* vrow = vg.data() + x * n;
                    for (std::int64_t y = 0; y < n; ++y) {
                        const std::complex<double>& ph = w[idx];
                        urow[y] += t.cu * ph;
                        drow[y] += cmu * ph;
                        vrow[y] += t.cv * ph;
                        idx += s2;
                        if (idx >= n) idx -= n;
                    }
                }
            }
        }
    };

    std::int64_t span = d == 2 ? n : points;
    int nthreads = std::min<std::int64_t>(thread_count(), span);
    if (nthreads <= 1) {
        synth_rows(0, span);
    } else {
        std::vector<std::thread> pool;
        std::int64_t chunk = (span + nthreads - 1) / nthreads;
        for (int i = 0; i < nthreads; ++i) {
            std::int64_t a = i * chunk, b = std::min(span, a + chunk);
            if (a >= b) break;
            pool.emplace_back(synth_rows, a, b);
        }
        for (auto& th : pool) th.join();
    }

    std::complex<double> q = op.q.to_complex(), p = op.p.to_complex();
    GridOracleReport rep;
    rep.grid_n = grid_n;
    for (std::int64_t i = 0; i < points; ++i) {
        std::complex<double> lhs = dg[i] - q * ug[i] - p * std::conj(ug[i]);
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(lhs - vg[i]));
        rep.max_ref = std::max(rep.max_ref, std::abs(vg[i]));
    }
    return rep;
}

}  // namespace vekua
