#pragma once

// Dormand-Prince 8(5,3) with 7th-order dense output, after Hairer's DOP853.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace kvlasov {
namespace dop853 {

inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double c14 = 0.1e+00;
inline constexpr double c15 = 0.2e+00;
inline constexpr double c16 = 0.777777777777777777777777777778e+00;
inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;
inline constexpr double a141 = 5.61675022830479523392909219681e-2;
inline constexpr double a147 = 2.53500210216624811088794765333e-1;
inline constexpr double a148 = -2.46239037470802489917441475441e-1;
inline constexpr double a149 = -1.24191423263816360469010140626e-1;
inline constexpr double a1410 = 1.5329179827876569731206322685e-1;
inline constexpr double a1411 = 8.20105229563468988491666602057e-3;
inline constexpr double a1412 = 7.56789766054569976138603589584e-3;
inline constexpr double a1413 = -8.298e-3;
inline constexpr double a151 = 3.18346481635021405060768473261e-2;
inline constexpr double a156 = 2.83009096723667755288322961402e-2;
inline constexpr double a157 = 5.35419883074385676223797384372e-2;
inline constexpr double a158 = -5.49237485713909884646569340306e-2;
inline constexpr double a1511 = -1.08347328697249322858509316994e-4;
inline constexpr double a1512 = 3.82571090835658412954920192323e-4;
inline constexpr double a1513 = -3.40465008687404560802977114492e-4;
inline constexpr double a1514 = 1.41312443674632500278074618366e-1;
inline constexpr double a161 = -4.28896301583791923408573538692e-1;
inline constexpr double a166 = -4.69762141536116384314449447206e0;
inline constexpr double a167 = 7.68342119606259904184240953878e0;
inline constexpr double a168 = 4.06898981839711007970213554331e0;
inline constexpr double a169 = 3.56727187455281109270669543021e-1;
inline constexpr double a1613 = -1.39902416515901462129418009734e-3;
inline constexpr double a1614 = 2.9475147891527723389556272149e0;
inline constexpr double a1615 = -9.15095847217987001081870187138e0;
inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;
inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;
inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;
inline constexpr double d41 = -0.84289382761090128651353491142e+01;
inline constexpr double d46 = 0.56671495351937776962531783590e+00;
inline constexpr double d47 = -0.30689499459498916912797304727e+01;
inline constexpr double d48 = 0.23846676565120698287728149680e+01;
inline constexpr double d49 = 0.21170345824450282767155149946e+01;
inline constexpr double d410 = -0.87139158377797299206789907490e+00;
inline constexpr double d411 = 0.22404374302607882758541771650e+01;
inline constexpr double d412 = 0.63157877876946881815570249290e+00;
inline constexpr double d413 = -0.88990336451333310820698117400e-01;
inline constexpr double d414 = 0.18148505520854727256656404962e+02;
inline constexpr double d415 = -0.91946323924783554000451984436e+01;
inline constexpr double d416 = -0.44360363875948939664310572000e+01;
inline constexpr double d51 = 0.10427508642579134603413151009e+02;
inline constexpr double d56 = 0.24228349177525818288430175319e+03;
inline constexpr double d57 = 0.16520045171727028198505394887e+03;
inline constexpr double d58 = -0.37454675472269020279518312152e+03;
inline constexpr double d59 = -0.22113666853125306036270938578e+02;
inline constexpr double d510 = 0.77334326684722638389603898808e+01;
inline constexpr double d511 = -0.30674084731089398182061213626e+02;
inline constexpr double d512 = -0.93321305264302278729567221706e+01;
inline constexpr double d513 = 0.15697238121770843886131091075e+02;
inline constexpr double d514 = -0.31139403219565177677282850411e+02;
inline constexpr double d515 = -0.93529243588444783865713862664e+01;
inline constexpr double d516 = 0.35816841486394083752465898540e+02;
inline constexpr double d61 = 0.19985053242002433820987653617e+02;
inline constexpr double d66 = -0.38703730874935176555105901742e+03;
inline constexpr double d67 = -0.18917813819516756882830838328e+03;
inline constexpr double d68 = 0.52780815920542364900561016686e+03;
inline constexpr double d69 = -0.11573902539959630126141871134e+02;
inline constexpr double d610 = 0.68812326946963000169666922661e+01;
inline constexpr double d611 = -0.10006050966910838403183860980e+01;
inline constexpr double d612 = 0.77771377980534432092869265740e+00;
inline constexpr double d613 = -0.27782057523535084065932004339e+01;
inline constexpr double d614 = -0.60196695231264120758267380846e+02;
inline constexpr double d615 = 0.84320405506677161018159903784e+02;
inline constexpr double d616 = 0.11992291136182789328035130030e+02;
inline constexpr double d71 = -0.25693933462703749003312586129e+02;
inline constexpr double d76 = -0.15418974869023643374053993627e+03;
inline constexpr double d77 = -0.23152937917604549567536039109e+03;
inline constexpr double d78 = 0.35763911791061412378285349910e+03;
inline constexpr double d79 = 0.93405324183624310003907691704e+02;
inline constexpr double d710 = -0.37458323136451633156875139351e+02;
inline constexpr double d711 = 0.10409964950896230045147246184e+03;
inline constexpr double d712 = 0.29840293426660503123344363579e+02;
inline constexpr double d713 = -0.43533456590011143754432175058e+02;
inline constexpr double d714 = 0.96324553959188282948394950600e+02;
inline constexpr double d715 = -0.39177261675615439165231486172e+02;
inline constexpr double d716 = -0.14972683625798562581422125276e+03;

}  // namespace dop853

struct Dop853Options {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_max = 0.0;  // 0: unlimited
  double safe = 0.9;
  double fac_min = 0.333;
  double fac_max = 6.0;
};

enum class StepStatus { accepted, rejected, invalid_rhs, underflow };

// Fixed-size explicit integrator. The right-hand side F has signature
// bool(double x, const State& y, State& dy) and returns false when y leaves
// the domain; the step is then rejected and shrunk.
template <std::size_t N>
class Dop853 {
 public:
  using State = std::array<double, N>;

  explicit Dop853(Dop853Options opt = {}) : opt_(opt) {}

  template <class F>
  bool init(F&& f, double x0, const State& y0, double direction, double h0 = 0.0) {
    x_ = x0;
    y_ = y0;
    dir_ = direction >= 0 ? 1.0 : -1.0;
    reject_ = false;
    facold_ = 1e-4;
    n_accepted_ = n_rejected_ = n_eval_ = 0;
    if (!eval(f, x_, y_, k1_)) return false;
    h_ = h0 > 0.0 ? h0 : initial_step(f);
    return h_ > 0.0;
  }

  // Advances by one accepted step, retrying internally on rejection.
  template <class F>
  StepStatus step(F&& f, std::size_t max_retries = 64) {
    using namespace dop853;
    const double n = static_cast<double>(N);
    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
      if (opt_.h_max > 0.0) h_ = std::min(h_, opt_.h_max);
      if (h_ < 1e-14 * std::max(1.0, std::abs(x_))) return StepStatus::underflow;
      const double h = dir_ * h_;
      if (!stages(f, h)) {
        h_ *= 0.25;
        reject_ = true;
        ++n_rejected_;
        continue;
      }
      double err = 0.0, err2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
        const double e3 = k4_[i] - e31 * k1_[i] - e32 * k9_[i] - e33 * k3_[i];
        const double e5 = e51 * k1_[i] + e56 * k6_[i] + e57 * k7_[i] + e58 * k8_[i] + e59 * k9_[i] +
                          e510 * k10_[i] + e511 * k2_[i] + e512 * k3_[i];
        err2 += (e3 / sk) * (e3 / sk);
        err += (e5 / sk) * (e5 / sk);
      }
      double deno = err + 0.01 * err2;
      if (deno <= 0.0) deno = 1.0;
      err = h_ * err / std::sqrt(n * deno);
      if (!std::isfinite(err)) {
        h_ *= 0.25;
        reject_ = true;
        ++n_rejected_;
        continue;
      }
      const double fac11 = std::pow(err, 0.125);
      double fac = std::clamp(fac11 / opt_.safe, 1.0 / opt_.fac_max, 1.0 / opt_.fac_min);
      double hnew = h_ / fac;
      if (err <= 1.0) {
        facold_ = std::max(err, 1e-4);
        if (!eval(f, x_ + h, ynew_, k13_)) {
          h_ *= 0.25;
          reject_ = true;
          ++n_rejected_;
          continue;
        }
        if (!dense_coefficients(f, h)) {
          h_ *= 0.25;
          reject_ = true;
          ++n_rejected_;
          continue;
        }
        xold_ = x_;
        hold_ = h;
        yold_ = y_;
        x_ += h;
        y_ = ynew_;
        k1_ = k13_;
        if (reject_) hnew = std::min(hnew, h_);
        reject_ = false;
        h_ = hnew;
        ++n_accepted_;
        return StepStatus::accepted;
      }
      hnew = h_ / std::min(1.0 / opt_.fac_min, fac11 / opt_.safe);
      reject_ = true;
      ++n_rejected_;
      h_ = hnew;
    }
    return StepStatus::rejected;
  }

  // Continuous extension on the last accepted step [x_old, x].
  State dense(double x) const {
    const double s = (x - xold_) / hold_;
    const double s1 = 1.0 - s;
    State out;
    for (std::size_t i = 0; i < N; ++i) {
      const double conpar = r5_[i] + s * (r6_[i] + s1 * (r7_[i] + s * r8_[i]));
      out[i] = r1_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * conpar)));
    }
    return out;
  }

  double dense_component(std::size_t i, double x) const {
    const double s = (x - xold_) / hold_;
    const double s1 = 1.0 - s;
    const double conpar = r5_[i] + s * (r6_[i] + s1 * (r7_[i] + s * r8_[i]));
    return r1_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * conpar)));
  }

  double x() const { return x_; }
  double x_old() const { return xold_; }
  const State& y() const { return y_; }
  const State& y_old() const { return yold_; }
  const State& dy() const { return k1_; }
  double step_size() const { return h_; }
  void set_step_size(double h) { h_ = h; }
  std::size_t accepted() const { return n_accepted_; }
  std::size_t rejected() const { return n_rejected_; }
  std::size_t evaluations() const { return n_eval_; }

 private:
  template <class F>
  bool eval(F&& f, double x, const State& y, State& dy) {
    ++n_eval_;
    if (!f(x, y, dy)) return false;
    for (double v : dy)
      if (!std::isfinite(v)) return false;
    return true;
  }

  template <class F>
  double initial_step(F&& f) {
    const double n = static_cast<double>(N);
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);
    State y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + dir_ * h * k1_[i];
    if (!eval(f, x_ + dir_ * h, y1, f1)) return h * 1e-3;
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
      const double d = (f1[i] - k1_[i]) / sk;
      der2 += d * d;
    }
    der2 = std::sqrt(der2 / n) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf / n));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    h = std::min(100.0 * h, h1);
    if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);
    return h;
  }

  template <class F>
  bool stages(F&& f, double h) {
    using namespace dop853;
    const double x = x_;
    State yw;
    auto fill = [&](auto&& comb) {
      for (std::size_t i = 0; i < N; ++i) yw[i] = y_[i] + h * comb(i);
    };
    fill([&](std::size_t i) { return a21 * k1_[i]; });
    if (!eval(f, x + c2 * h, yw, k2_)) return false;
    fill([&](std::size_t i) { return a31 * k1_[i] + a32 * k2_[i]; });
    if (!eval(f, x + c3 * h, yw, k3_)) return false;
    fill([&](std::size_t i) { return a41 * k1_[i] + a43 * k3_[i]; });
    if (!eval(f, x + c4 * h, yw, k4_)) return false;
    fill([&](std::size_t i) { return a51 * k1_[i] + a53 * k3_[i] + a54 * k4_[i]; });
    if (!eval(f, x + c5 * h, yw, k5_)) return false;
    fill([&](std::size_t i) { return a61 * k1_[i] + a64 * k4_[i] + a65 * k5_[i]; });
    if (!eval(f, x + c6 * h, yw, k6_)) return false;
    fill([&](std::size_t i) { return a71 * k1_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]; });
    if (!eval(f, x + c7 * h, yw, k7_)) return false;
    fill([&](std::size_t i) { return a81 * k1_[i] + a84 * k4_[i] + a85 * k5_[i] + a86 * k6_[i] + a87 * k7_[i]; });
    if (!eval(f, x + c8 * h, yw, k8_)) return false;
    fill([&](std::size_t i) {
      return a91 * k1_[i] + a94 * k4_[i] + a95 * k5_[i] + a96 * k6_[i] + a97 * k7_[i] + a98 * k8_[i];
    });
    if (!eval(f, x + c9 * h, yw, k9_)) return false;
    fill([&](std::size_t i) {
      return a101 * k1_[i] + a104 * k4_[i] + a105 * k5_[i] + a106 * k6_[i] + a107 * k7_[i] + a108 * k8_[i] +
             a109 * k9_[i];
    });
    if (!eval(f, x + c10 * h, yw, k10_)) return false;
    fill([&](std::size_t i) {
      return a111 * k1_[i] + a114 * k4_[i] + a115 * k5_[i] + a116 * k6_[i] + a117 * k7_[i] + a118 * k8_[i] +
             a119 * k9_[i] + a1110 * k10_[i];
    });
    if (!eval(f, x + c11 * h, yw, k2_)) return false;
    fill([&](std::size_t i) {
      return a121 * k1_[i] + a124 * k4_[i] + a125 * k5_[i] + a126 * k6_[i] + a127 * k7_[i] + a128 * k8_[i] +
             a129 * k9_[i] + a1210 * k10_[i] + a1211 * k2_[i];
    });
    if (!eval(f, x + h, yw, k3_)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      k4_[i] = b1 * k1_[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] + b9 * k9_[i] + b10 * k10_[i] +
               b11 * k2_[i] + b12 * k3_[i];
      ynew_[i] = y_[i] + h * k4_[i];
    }
    return true;
  }

  template <class F>
  bool dense_coefficients(F&& f, double h) {
    using namespace dop853;
    const double x = x_;
    for (std::size_t i = 0; i < N; ++i) {
      r1_[i] = y_[i];
      r2_[i] = ynew_[i] - y_[i];
      r3_[i] = h * k1_[i] - r2_[i];
      r4_[i] = r2_[i] - h * k13_[i] - r3_[i];
      r5_[i] = d41 * k1_[i] + d46 * k6_[i] + d47 * k7_[i] + d48 * k8_[i] + d49 * k9_[i] + d410 * k10_[i] +
               d411 * k2_[i] + d412 * k3_[i];
      r6_[i] = d51 * k1_[i] + d56 * k6_[i] + d57 * k7_[i] + d58 * k8_[i] + d59 * k9_[i] + d510 * k10_[i] +
               d511 * k2_[i] + d512 * k3_[i];
      r7_[i] = d61 * k1_[i] + d66 * k6_[i] + d67 * k7_[i] + d68 * k8_[i] + d69 * k9_[i] + d610 * k10_[i] +
               d611 * k2_[i] + d612 * k3_[i];
      r8_[i] = d71 * k1_[i] + d76 * k6_[i] + d77 * k7_[i] + d78 * k8_[i] + d79 * k9_[i] + d710 * k10_[i] +
               d711 * k2_[i] + d712 * k3_[i];
    }
    State yw, k14, k15, k16;
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y_[i] + h * (a141 * k1_[i] + a147 * k7_[i] + a148 * k8_[i] + a149 * k9_[i] + a1410 * k10_[i] +
                           a1411 * k2_[i] + a1412 * k3_[i] + a1413 * k13_[i]);
    if (!eval(f, x + c14 * h, yw, k14)) return false;
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y_[i] + h * (a151 * k1_[i] + a156 * k6_[i] + a157 * k7_[i] + a158 * k8_[i] + a1511 * k2_[i] +
                           a1512 * k3_[i] + a1513 * k13_[i] + a1514 * k14[i]);
    if (!eval(f, x + c15 * h, yw, k15)) return false;
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y_[i] + h * (a161 * k1_[i] + a166 * k6_[i] + a167 * k7_[i] + a168 * k8_[i] + a169 * k9_[i] +
                           a1613 * k13_[i] + a1614 * k14[i] + a1615 * k15[i]);
    if (!eval(f, x + c16 * h, yw, k16)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      r5_[i] = h * (r5_[i] + d413 * k13_[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
      r6_[i] = h * (r6_[i] + d513 * k13_[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
      r7_[i] = h * (r7_[i] + d613 * k13_[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
      r8_[i] = h * (r8_[i] + d713 * k13_[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
    }
    return true;
  }

  Dop853Options opt_;
  double x_ = 0.0, xold_ = 0.0, h_ = 0.0, hold_ = 1.0, dir_ = 1.0, facold_ = 1e-4;
  bool reject_ = false;
  std::size_t n_accepted_ = 0, n_rejected_ = 0, n_eval_ = 0;
  State y_{}, yold_{}, ynew_{};
  State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{}, k8_{}, k9_{}, k10_{}, k13_{};
  State r1_{}, r2_{}, r3_{}, r4_{}, r5_{}, r6_{}, r7_{}, r8_{};
};

}  // namespace kvlasov
