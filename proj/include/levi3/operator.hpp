#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cubic.hpp"
#include "errors.hpp"
#include "expr.hpp"

namespace levi3 {

using TJet = Taylor<cplx, 3>;
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& a) {
    int s = 0;
    for (int x : a) s += x;
    return s;
}

/// Polynomial in tau whose coefficients are t-jets. `order` is the number of
/// valid t-derivatives left in the coefficients.
struct TauPoly {
    std::vector<TJet> c;  // c[k] multiplies tau^k
    int order = 3;

    TauPoly dtau() const {
        TauPoly r{{}, order};
        for (std::size_t k = 1; k < c.size(); ++k) r.c.push_back(c[k] * cplx(double(k)));
        if (r.c.empty()) r.c.push_back(TJet{});
        return r;
    }
    TauPoly dt() const {
        TauPoly r{c, order - 1};
        for (auto& x : r.c) {
            for (int k = 0; k < 3; ++k) x.c[k] = x.c[k + 1] * cplx(double(k + 1));
            x.c[3] = 0;
        }
        return r;
    }
    /// Value at fixed tau, as a t-jet.
    TJet at(cplx tau) const {
        TJet r;
        for (std::size_t k = c.size(); k-- > 0;) r = r * tau + c[k];
        return r;
    }
    cplx value(cplx tau) const { return at(tau).c[0]; }
    friend TauPoly operator+(TauPoly a, const TauPoly& b) {
        if (b.c.size() > a.c.size()) a.c.resize(b.c.size());
        for (std::size_t k = 0; k < b.c.size(); ++k) a.c[k] += b.c[k];
        a.order = std::min(a.order, b.order);
        return a;
    }
    friend TauPoly operator*(cplx s, TauPoly a) {
        for (auto& x : a.c) x *= s;
        return a;
    }
};

/// A symbol and the derivatives used by the root-level identities.
struct SymbolJet {
    cplx value{}, d_t{}, d_tt{}, d_tau{}, d_t_d_tau{};
};

inline SymbolJet symbol_jet(const TauPoly& P, cplx tau) {
    const TJet v = P.at(tau), s = P.dtau().at(tau);
    return {v.d(0), v.d(1), v.d(2), s.d(0), s.d(1)};
}

/// P(t, r(t)) with its first two total derivatives along a real root jet.
inline std::array<cplx, 3> along(const TauPoly& P, const RealJet2& r) {
    const TauPoly Pt = P.dtau();
    const TJet v = P.at(r.v), s = Pt.at(r.v), ss = Pt.dtau().at(r.v);
    return {v.d(0), v.d(1) + s.d(0) * r.d1,
            v.d(2) + 2.0 * s.d(1) * r.d1 + ss.d(0) * r.d1 * r.d1 + s.d(0) * r.d2};
}

/// Linear operator sum_{j + |alpha| <= m} a_{j,alpha}(t) D_t^j D_x^alpha with
/// leading D_t^m, m in {2, 3}.
class Operator {
public:
    std::string name = "unnamed";
    int order = 3;
    int dimension = 1;
    double horizon = 1.0;

    struct Key {
        int j;
        MultiIndex alpha;
        friend bool operator<(const Key& a, const Key& b) {
            return a.j != b.j ? a.j < b.j : a.alpha < b.alpha;
        }
    };
    std::map<Key, TimeFn> coeffs;

    Operator() = default;
    Operator(std::string nm, int m, int n, double T) : name(std::move(nm)), order(m), dimension(n), horizon(T) {
        if (m != 2 && m != 3) throw ConfigError("order must be 2 or 3");
        if (n < 1) throw ConfigError("dimension must be positive");
        if (!(T > 0)) throw ConfigError("horizon T must be positive");
    }

    void set(int j, MultiIndex alpha, const TimeFn& f) {
        if (static_cast<int>(alpha.size()) != dimension)
            throw ConfigError("multi-index length does not match dimension");
        for (int x : alpha)
            if (x < 0) throw ConfigError("negative multi-index entry");
        if (j < 0 || j >= order) throw ConfigError("time order j must lie in [0, order)");
        if (j + total_degree(alpha) > order) throw ConfigError("term order exceeds operator order");
        if (j + total_degree(alpha) == order && f.has_imag())
            throw ConfigError("principal-part coefficient must be real (contains i)");
        coeffs[Key{j, std::move(alpha)}] = f;
    }
    void set(int j, MultiIndex alpha, std::string_view expr) { set(j, std::move(alpha), TimeFn::parse(expr)); }

    bool has_constant_coefficients() const {
        for (auto& [k, f] : coeffs)
            if (f.depends_on_t()) return false;
        return true;
    }
};

/// Operator with a fixed frequency xi; coefficients grouped by (j, j + |alpha|).
class BoundOperator {
public:
    BoundOperator(const Operator& op, std::vector<double> xi) : op_(&op), xi_(std::move(xi)) {
        if (static_cast<int>(xi_.size()) != op.dimension) throw ConfigError("xi has wrong dimension");
        double s = 0;
        for (double x : xi_) s += x * x;
        norm_ = std::sqrt(s);
        for (auto& [k, f] : op.coeffs) {
            double mono = 1;
            for (std::size_t i = 0; i < xi_.size(); ++i)
                for (int e = 0; e < k.alpha[i]; ++e) mono *= xi_[i];
            Term term{k.j, k.j + total_degree(k.alpha), mono, &f, {}};
            if (!f.depends_on_t()) term.cached = f.eval_taylor<3>(0.0);
            terms_.push_back(term);
        }
    }

    const Operator& op() const { return *op_; }
    const std::vector<double>& xi() const { return xi_; }
    double xi_norm() const { return norm_; }
    int order() const { return op_->order; }

    /// C[j][d]: sum over |alpha| = d - j of a_{j,alpha}(t) xi^alpha.
    struct Grouped {
        std::array<std::array<TJet, 4>, 4> C{};
    };

    Grouped grouped(double t) const {
        Grouped g;
        for (auto& term : terms_) {
            TJet v = term.fn->depends_on_t() ? term.fn->eval_taylor<3>(t) : term.cached;
            g.C[term.j][term.deg] += v * cplx(term.mono);
        }
        return g;
    }

    /// Homogeneous part of degree d as a polynomial in tau (real monomials).
    TauPoly part(const Grouped& g, int d) const {
        TauPoly P;
        P.c.resize(d + 1);
        for (int j = 0; j <= d && j < order(); ++j) P.c[j] = g.C[j][d];
        if (d == order()) P.c[d] = TJet::constant(1.0);
        return P;
    }

    /// Principal symbol of a third-order operator as a cubic jet.
    CubicJet principal_cubic(double t) const { return principal_cubic(grouped(t)); }
    CubicJet principal_cubic(const Grouped& g) const {
        auto re = [](const TJet& x) { return RealJet2{x.c[0].real(), x.d(1).real(), x.d(2).real()}; };
        return {re(g.C[2][3]), re(g.C[1][3]), re(g.C[0][3])};
    }

    /// ODE coefficients c_j(t) = sum_alpha a_{j,alpha}(t) (i xi)^alpha.
    std::array<cplx, 3> ode_coefficients(double t) const {
        std::array<cplx, 3> c{};
        for (auto& term : terms_) {
            cplx v = term.fn->depends_on_t() ? term.fn->eval(t) : term.cached.c[0];
            c[term.j] += v * term.mono * ipow_i(term.deg - term.j);
        }
        return c;
    }

    bool constant_coefficients() const { return op_->has_constant_coefficients(); }

private:
    struct Term {
        int j, deg;
        double mono;
        const TimeFn* fn;
        TJet cached;
    };
    static cplx ipow_i(int k) {
        static const cplx p[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
        return p[k & 3];
    }
    const Operator* op_;
    std::vector<double> xi_;
    double norm_ = 0;
    std::vector<Term> terms_;
};

/// Principal, sub-principal and lower symbols of a third-order operator plus
/// the checked symbols at one (t, xi).
struct Symbols {
    TauPoly L, M, N;
    cplx p{};
    TauPoly Mc;  ///< M - 1/2 d_t d_tau L
    TauPoly Nc;  ///< N - 1/2 d_t d_tau M + 1/12 d_t^2 d_tau^2 L
};

inline Symbols symbols(const BoundOperator& b, double t) {
    if (b.order() != 3) throw ConfigError("symbols() needs a third-order operator");
    auto g = b.grouped(t);
    Symbols s;
    s.L = b.part(g, 3);
    s.M = b.part(g, 2);
    s.N = b.part(g, 1);
    s.p = g.C[0][0].c[0];
    s.Mc = s.M + cplx(-0.5) * s.L.dtau().dt();
    s.Nc = s.N + cplx(-0.5) * s.M.dtau().dt() + cplx(1.0 / 12) * s.L.dtau().dtau().dt().dt();
    return s;
}

/// Sub-principal and lower symbols at (t, tau, xi).
struct LowerSymbols {
    SymbolJet M, N;
    cplx p{};
};

inline LowerSymbols eval_lower(const BoundOperator& b, double t, cplx tau) {
    Symbols s = symbols(b, t);
    return {symbol_jet(s.M, tau), symbol_jet(s.N, tau), s.p};
}

inline std::pair<SymbolJet, SymbolJet> checked_symbols(const BoundOperator& b, double t, cplx tau) {
    Symbols s = symbols(b, t);
    return {symbol_jet(s.Mc, tau), symbol_jet(s.Nc, tau)};
}

/// Roots of L_eps with eps |xi| = 1 and of its tau-derivative, with jets.
struct AuxiliaryRoots {
    Cubic cubic;                 ///< coefficients of the principal symbol L
    std::array<double, 3> tau;   ///< roots of L
    std::array<RootJet, 3> lam;  ///< roots of L - d_tau^2 L
    std::array<RootJet, 2> mu;   ///< roots of d_tau L_eps
    DerivativeRoots sigma;       ///< roots of d_tau L
};

inline AuxiliaryRoots auxiliary_roots(const CubicJet& cj, SolveContext ctx = {}) {
    AuxiliaryRoots a;
    a.cubic = values(cj);
    a.tau = solve_cubic_real(a.cubic, 1e-9, ctx);
    const CubicJet reg = regularize(cj, 1.0);
    const Cubic rc = values(reg);
    a.lam = root_jets(reg, solve_cubic_real(rc, 1e-9, ctx));
    a.mu = derivative_root_jets(reg, derivative_quadratic(rc));
    a.sigma = derivative_quadratic(a.cubic);
    return a;
}

/// Regularized cubic L_eps at (t, xi) and its roots.
struct Regularized {
    CubicJet cubic;
    double eps_xi;
    std::array<double, 3> roots;
};

inline Regularized regularize(const BoundOperator& b, double t, double eps) {
    const double s = eps * eps * b.xi_norm() * b.xi_norm();
    CubicJet c = regularize(b.principal_cubic(t), s);
    return {c, std::sqrt(s), solve_cubic_real(values(c), 1e-9, {t, b.xi_norm()})};
}

/// Unit direction scaled to |xi|.
inline std::vector<double> scaled(const std::vector<double>& dir, double norm) {
    double s = 0;
    for (double x : dir) s += x * x;
    s = std::sqrt(s);
    std::vector<double> r(dir);
    for (auto& x : r) x *= norm / s;
    return r;
}

/// Check that the principal symbol is hyperbolic on a grid of (t, xi).
inline void validate_hyperbolicity(const Operator& op, const std::vector<std::vector<double>>& directions,
                                   const std::vector<double>& norms, int grid = 256) {
    for (auto& d : directions)
        for (double nrm : norms) {
            BoundOperator b(op, scaled(d, nrm));
            for (int k = 0; k <= grid; ++k) {
                const double t = op.horizon * k / grid;
                auto g = b.grouped(t);
                if (op.order == 3) {
                    solve_cubic_real(values(b.principal_cubic(g)), 1e-9, {t, nrm});
                } else {
                    const double a = g.C[1][2].c[0].real(), c = g.C[0][2].c[0].real();
                    const double disc = a * a - 4 * c;
                    const double scale = 1 + a * a + std::abs(c);
                    if (disc < -1e-9 * scale)
                        throw HyperbolicityViolation(disc, t, nrm, "second-order symbol has non-real roots");
                }
            }
        }
}

}  // namespace levi3
