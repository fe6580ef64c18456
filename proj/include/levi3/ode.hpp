#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace levi3 {

/// State of the mode system: (v, v', v'').
using State3 = std::array<cplx, 3>;

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 50'000'000;
    double renormalize_above = 1e100;
};

struct IntegratorStats {
    long steps = 0, rejected = 0, evaluations = 0;
};

/// Output at the requested points; the state is stored divided by exp(log_scale).
struct Trajectory {
    std::vector<double> t;
    std::vector<State3> y;
    std::vector<double> log_scale;
    IntegratorStats stats;
};

namespace dop853 {
// Dormand-Prince 8(5,3) tableau
constexpr double c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
                 c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
                 c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00,
                 c8 = 0.307692307692307692307692307692e+00, c9 = 0.651282051282051282051282051282e+00,
                 c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00;
constexpr double a21 = 5.26001519587677318785587544488e-2, a31 = 1.97250569845378994544595329183e-2,
                 a32 = 5.91751709536136983633785987549e-2, a41 = 2.95875854768068491816892993775e-2,
                 a43 = 8.87627564304205475450678981324e-2, a51 = 2.41365134159266685502369798665e-1,
                 a53 = -8.84549479328286085344864962717e-1, a54 = 9.24834003261792003115737966543e-1,
                 a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
                 a65 = 1.25467687566822425016691814123e-1, a71 = 3.7109375e-2,
                 a74 = 1.70252211019544039314978060272e-1, a75 = 6.02165389804559606850219397283e-2,
                 a76 = -1.7578125e-2, a81 = 3.70920001185047927108779319836e-2,
                 a84 = 1.70383925712239993810214054705e-1, a85 = 1.07262030446373284651809199168e-1,
                 a86 = -1.53194377486244017527936158236e-2, a87 = 8.27378916381402288758473766002e-3,
                 a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
                 a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
                 a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
                 a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
                 a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
                 a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
                 a109 = -2.03312017085086261358222928593e-2, a111 = -9.3714243008598732571704021658e-1,
                 a114 = 5.18637242884406370830023853209e0, a115 = 1.09143734899672957818500254654e0,
                 a116 = -8.14978701074692612513997267357e0, a117 = -1.85200656599969598641566180701e1,
                 a118 = 2.27394870993505042818970056734e1, a119 = 2.49360555267965238987089396762e0,
                 a1110 = -3.0467644718982195003823669022e0, a121 = 2.27331014751653820792359768449e0,
                 a124 = -1.05344954667372501984066689879e1, a125 = -2.00087205822486249909675718444e0,
                 a126 = -1.79589318631187989172765950534e1, a127 = 2.79488845294199600508499808837e1,
                 a128 = -2.85899827713502369474065508674e0, a129 = -8.87285693353062954433549289258e0,
                 a1210 = 1.23605671757943030647266201528e1, a1211 = 6.43392746015763530355970484046e-1;
constexpr double b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
                 b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
                 b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
                 b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2;
constexpr double e31 = 0.244094488188976377952755905512e+00, e32 = 0.733846688281611857341361741547e+00,
                 e33 = 0.220588235294117647058823529412e-01;
constexpr double e51 = 0.1312004499419488073250102996e-01, e56 = -0.1225156446376204440720569753e+01,
                 e57 = -0.4957589496572501915214079952e+00, e58 = 0.1664377182454986536961530415e+01,
                 e59 = -0.3503288487499736816886487290e+00, e510 = 0.3341791187130174790297318841e+00,
                 e511 = 0.8192320648511571246570742613e-01, e512 = -0.2235530786388629525884427845e-01;
}  // namespace dop853

/// Integrates y' = f(t, y) for a linear homogeneous 3-component complex
/// system, stepping exactly onto every output point. Because the system is
/// linear the state may be rescaled; the scale is tracked in log space.
inline Trajectory integrate_linear3(const std::function<State3(double, const State3&)>& f, State3 y0,
                                    const std::vector<double>& out_t, IntegratorOptions opt = {}) {
    using namespace dop853;
    Trajectory tr;
    if (out_t.empty()) return tr;
    double t = out_t.front();
    State3 y = y0;
    double log_scale = 0;
    auto norm = [](const State3& s) { return std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])}); };
    auto renorm = [&] {
        const double n = norm(y);
        if (n > opt.renormalize_above) {
            for (auto& x : y) x /= n;
            log_scale += std::log(n);
        }
    };
    auto axpy = [](const State3& base, double h, std::initializer_list<std::pair<double, const State3*>> terms) {
        State3 r = base;
        for (auto& [c, k] : terms)
            for (int i = 0; i < 3; ++i) r[i] += h * c * (*k)[i];
        return r;
    };
    tr.t.push_back(t);
    tr.y.push_back(y);
    tr.log_scale.push_back(0);
    State3 k1 = f(t, y);
    ++tr.stats.evaluations;

    // initial step from the Hairer heuristic
    double h;
    {
        double dnf = 0, dny = 0;
        for (int i = 0; i < 3; ++i) {
            const double sk = opt.atol + opt.rtol * std::abs(y[i]);
            dnf += std::norm(k1[i] / sk);
            dny += std::norm(y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        const double span = out_t.back() - out_t.front();
        h = std::min(h, span);
        if (h <= 0) h = 1e-6;
    }
    double facold = 1e-4;
    for (std::size_t target = 1; target < out_t.size(); ++target) {
        const double tend = out_t[target];
        while (t < tend) {
            if (tr.stats.steps + tr.stats.rejected > opt.max_steps)
                throw IntegratorError(t, "integrator exceeded the step budget at t = " + std::to_string(t));
            bool last = false;
            double hs = h;
            if (t + hs >= tend || tend - (t + hs) < 1e-12 * std::abs(tend)) {
                hs = tend - t;
                last = true;
            }
            if (hs < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegratorError(t, "step size underflow at t = " + std::to_string(t));
            const State3 k2 = f(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
            const State3 k3 = f(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
            const State3 k4 = f(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a43, &k3}}));
            const State3 k5 = f(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a53, &k3}, {a54, &k4}}));
            const State3 k6 = f(t + c6 * hs, axpy(y, hs, {{a61, &k1}, {a64, &k4}, {a65, &k5}}));
            const State3 k7 = f(t + c7 * hs, axpy(y, hs, {{a71, &k1}, {a74, &k4}, {a75, &k5}, {a76, &k6}}));
            const State3 k8 =
                f(t + c8 * hs, axpy(y, hs, {{a81, &k1}, {a84, &k4}, {a85, &k5}, {a86, &k6}, {a87, &k7}}));
            const State3 k9 = f(t + c9 * hs, axpy(y, hs, {{a91, &k1}, {a94, &k4}, {a95, &k5}, {a96, &k6},
                                                         {a97, &k7}, {a98, &k8}}));
            const State3 k10 = f(t + c10 * hs, axpy(y, hs, {{a101, &k1}, {a104, &k4}, {a105, &k5}, {a106, &k6},
                                                            {a107, &k7}, {a108, &k8}, {a109, &k9}}));
            const State3 k11 = f(t + c11 * hs, axpy(y, hs, {{a111, &k1}, {a114, &k4}, {a115, &k5}, {a116, &k6},
                                                            {a117, &k7}, {a118, &k8}, {a119, &k9}, {a1110, &k10}}));
            const State3 k12 = f(t + hs, axpy(y, hs, {{a121, &k1}, {a124, &k4}, {a125, &k5}, {a126, &k6}, {a127, &k7},
                                                     {a128, &k8}, {a129, &k9}, {a1210, &k10}, {a1211, &k11}}));
            tr.stats.evaluations += 11;
            State3 bsum, ynew;
            double err3 = 0, err5 = 0;
            for (int i = 0; i < 3; ++i) {
                bsum[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                          b11 * k11[i] + b12 * k12[i];
                ynew[i] = y[i] + hs * bsum[i];
                const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const cplx e3 = bsum[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
                const cplx e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] +
                                e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
                err3 += std::norm(e3 / sk);
                err5 += std::norm(e5 / sk);
            }
            double deno = err5 + 0.01 * err3;
            if (deno <= 0) deno = 1;
            // six real components
            const double err = std::abs(hs) * err5 * std::sqrt(1.0 / (6 * deno));
            const double fac11 = std::pow(err, 0.125);
            if (err <= 1) {
                facold = std::max(err, 1e-4);
                t = last ? tend : t + hs;
                y = ynew;
                ++tr.stats.steps;
                renorm();
                k1 = f(t, y);
                ++tr.stats.evaluations;
                const double fac = std::clamp(fac11 / 0.9, 1.0 / 6.0, 3.0);
                const double hn = hs / fac;
                h = last ? std::max(h, hn) : hn;
            } else {
                ++tr.stats.rejected;
                h = hs / std::min(3.0, fac11 / 0.9);
            }
            if (!std::isfinite(h) || !std::isfinite(std::abs(y[0])))
                throw IntegratorError(t, "non-finite state at t = " + std::to_string(t));
        }
        tr.t.push_back(tend);
        tr.y.push_back(y);
        tr.log_scale.push_back(log_scale);
    }
    (void)facold;
    return tr;
}

}  // namespace levi3
