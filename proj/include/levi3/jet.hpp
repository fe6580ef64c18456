#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace levi3 {

using cplx = std::complex<double>;

/// Truncated Taylor series in t: c[k] = f^(k)(t0) / k!.
template <class T, int N>
struct Taylor {
    std::array<T, N + 1> c{};

    static Taylor constant(T v) {
        Taylor r;
        r.c[0] = v;
        return r;
    }
    static Taylor variable(T t0) {
        Taylor r;
        r.c[0] = t0;
        if constexpr (N >= 1) r.c[1] = T(1);
        return r;
    }

    /// k-th derivative.
    T d(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }

    Taylor& operator+=(const Taylor& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    Taylor& operator*=(T s) {
        for (auto& x : c) x *= s;
        return *this;
    }
    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator-(Taylor a) {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend Taylor operator*(Taylor a, T s) { return a *= s; }
    friend Taylor operator*(T s, Taylor a) { return a *= s; }
    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        Taylor r;
        for (int k = 0; k <= N; ++k)
            for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
        return r;
    }
    /// Caller guarantees b.c[0] != 0.
    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        Taylor r;
        for (int k = 0; k <= N; ++k) {
            T s = a.c[k];
            for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
            r.c[k] = s / b.c[0];
        }
        return r;
    }
};

template <class T, int N>
Taylor<T, N> exp(const Taylor<T, N>& f) {
    using std::exp;
    Taylor<T, N> e;
    e.c[0] = exp(f.c[0]);
    for (int k = 1; k <= N; ++k) {
        T s{};
        for (int j = 1; j <= k; ++j) s += double(j) * f.c[j] * e.c[k - j];
        e.c[k] = s / double(k);
    }
    return e;
}

/// Caller guarantees f.c[0] is a positive real.
template <class T, int N>
Taylor<T, N> log(const Taylor<T, N>& f) {
    using std::log;
    Taylor<T, N> g;
    g.c[0] = log(f.c[0]);
    for (int k = 1; k <= N; ++k) {
        T s{};
        for (int j = 1; j < k; ++j) s += double(j) * g.c[j] * f.c[k - j];
        g.c[k] = (f.c[k] - s / double(k)) / f.c[0];
    }
    return g;
}

template <class T, int N>
std::pair<Taylor<T, N>, Taylor<T, N>> sincos(const Taylor<T, N>& f) {
    using std::cos;
    using std::sin;
    Taylor<T, N> s, c;
    s.c[0] = sin(f.c[0]);
    c.c[0] = cos(f.c[0]);
    for (int k = 1; k <= N; ++k) {
        T a{}, b{};
        for (int j = 1; j <= k; ++j) {
            a += double(j) * f.c[j] * c.c[k - j];
            b += double(j) * f.c[j] * s.c[k - j];
        }
        s.c[k] = a / double(k);
        c.c[k] = -b / double(k);
    }
    return {s, c};
}

template <class T, int N>
Taylor<T, N> ipow(const Taylor<T, N>& f, int n) {
    Taylor<T, N> r = Taylor<T, N>::constant(T(1));
    Taylor<T, N> b = f;
    while (n > 0) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

/// Value and first two t-derivatives of a complex coefficient.
struct Jet2 {
    cplx v{}, d1{}, d2{};
};

/// Same for a real quantity.
struct RealJet2 {
    double v = 0, d1 = 0, d2 = 0;
};

template <int N>
Jet2 to_jet2(const Taylor<cplx, N>& f) {
    static_assert(N >= 2);
    return {f.d(0), f.d(1), f.d(2)};
}

}  // namespace levi3
