#include "fsreach/normal.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsreach {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Gauss-Kronrod (G7,K15) nodes and weights on [-1,1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Gk15Result {
  double integral;
  double error;
};

Gk15Result gk15(const std::function<double(double)>& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double res_k = kWgk[7] * fc;
  double res_g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    res_k += kWgk[j] * fsum;
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  res_k *= h;
  res_g *= h;
  const double diff = std::fabs(res_k - res_g);
  return {res_k, diff};
}

double adaptive_gk15_impl(const std::function<double(double)>& f, double a, double b,
                          double tol, int depth, int max_depth, double* abs_err) {
  const Gk15Result r = gk15(f, a, b);
  if (r.error <= tol || depth >= max_depth) {
    if (abs_err) *abs_err += r.error;
    return r.integral;
  }
  const double c = 0.5 * (a + b);
  return adaptive_gk15_impl(f, a, c, 0.5 * tol, depth + 1, max_depth, abs_err) +
         adaptive_gk15_impl(f, c, b, 0.5 * tol, depth + 1, max_depth, abs_err);
}

// sqrt of the first primes; irrational lattice generators per coordinate.
constexpr std::array<int, 20> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                         31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_ppf(double p) {
  if (p <= 0.0) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    throw std::domain_error("norm_ppf: p outside [0,1]");
  }
  if (p >= 1.0) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("norm_ppf: p outside [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
           2.05319162663775882187e0) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
           5.99832206555887937690e-1) *
               r +
           1.0);
  }
  return (q < 0.0) ? -val : val;
}

double norm_interval_prob(double mean, double stddev, double lo, double hi) {
  if (stddev <= 0.0) throw std::invalid_argument("norm_interval_prob: stddev <= 0");
  if (hi <= lo) return 0.0;
  const double zl = (lo - mean) / stddev;
  const double zh = (hi - mean) / stddev;
  double p;
  if (zl >= 0.0) {
    p = norm_cdf(-zl) - norm_cdf(-zh);  // right tail difference
  } else if (zh <= 0.0) {
    p = norm_cdf(zh) - norm_cdf(zl);
  } else {
    p = norm_cdf(zh) - norm_cdf(zl);
  }
  return std::fmax(0.0, std::fmin(1.0, p));
}

double bvn_upper(double h, double k, double rho) {
  static const double w6[] = {0.1713244923791705, 0.3607615730481384,
                              0.4679139345726904};
  static const double x6[] = {0.9324695142031522, 0.6612093864662647,
                              0.2386191860831970};
  static const double w12[] = {0.04717533638651177, 0.1069393259953183,
                               0.1600783285433464,  0.2031674267230659,
                               0.2334925365383547,  0.2491470458134029};
  static const double x12[] = {0.9815606342467191, 0.9041172563704750,
                               0.7699026741943050, 0.5873179542866171,
                               0.3678314989981802, 0.1252334085114692};
  static const double w20[] = {0.01761400713915212, 0.04060142980038694,
                               0.06267204833410906, 0.08327674157670475,
                               0.1019301198172404,  0.1181945319615184,
                               0.1316886384491766,  0.1420961093183821,
                               0.1491729864726037,  0.1527533871307259};
  static const double x20[] = {0.9931285991850949, 0.9639719272779138,
                               0.9122344282513259, 0.8391169718222188,
                               0.7463319064601508, 0.6360536807265150,
                               0.5108670019508271, 0.3737060887154196,
                               0.2277858511416451, 0.07652652113349733};

  if (std::isinf(h) || std::isinf(k)) {
    if ((std::isinf(h) && h > 0.0) || (std::isinf(k) && k > 0.0)) return 0.0;
    if (std::isinf(h) && std::isinf(k)) return 1.0;
    return std::isinf(h) ? norm_cdf(-k) : norm_cdf(-h);
  }

  const double* w;
  const double* x;
  int ng;
  const double ar = std::fabs(rho);
  if (ar < 0.3) {
    w = w6, x = x6, ng = 3;
  } else if (ar < 0.75) {
    w = w12, x = x12, ng = 6;
  } else {
    w = w20, x = x20, ng = 10;
  }

  double dh = h, dk = k, r = rho;
  double hk = dh * dk;
  double bvn = 0.0;
  const double twopi = 2.0 * M_PI;

  if (ar < 0.925) {
    if (ar > 0.0) {
      const double hs = (dh * dh + dk * dk) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < ng; ++i)
        for (double sgn : {-1.0, 1.0}) {
          const double sn = std::sin(asr * (1.0 + sgn * x[i]) / 2.0);
          bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      bvn = bvn * asr / (2.0 * twopi);
    }
    return std::fmax(0.0, std::fmin(1.0, bvn + norm_cdf(-dh) * norm_cdf(-dk)));
  }

  if (r < 0.0) {
    dk = -dk;
    hk = -hk;
  }
  if (ar < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (dh - dk) * (dh - dk);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0)
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
             c * d * as * as / 5.0);
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < ng; ++i)
      for (double sgn : {-1.0, 1.0}) {
        const double xs = a * (1.0 + sgn * x[i]);
        const double xs2 = xs * xs;
        const double rs = std::sqrt(1.0 - xs2);
        asr = -(bs / xs2 + hk) / 2.0;
        if (asr > -100.0)
          bvn += a * w[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs2 * (1.0 + d * xs2)));
      }
    bvn = -bvn / twopi;
  }
  if (r > 0.0)
    bvn += norm_cdf(-std::fmax(dh, dk));
  else {
    bvn = -bvn;
    if (dk > dh) bvn += norm_cdf(dk) - norm_cdf(dh);
  }
  return std::fmax(0.0, std::fmin(1.0, bvn));
}

double bvn_rect_prob(double lo1, double hi1, double lo2, double hi2, double rho) {
  if (!(hi1 > lo1) || !(hi2 > lo2)) return 0.0;
  const double p = bvn_upper(lo1, lo2, rho) - bvn_upper(lo1, hi2, rho) -
                   bvn_upper(hi1, lo2, rho) + bvn_upper(hi1, hi2, rho);
  return std::fmax(0.0, std::fmin(1.0, p));
}

double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double tol, double* abs_err, int max_depth) {
  if (abs_err) *abs_err = 0.0;
  if (!(a < b)) return 0.0;
  return adaptive_gk15_impl(f, a, b, tol, 0, max_depth, abs_err);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double lattice_coord(std::uint64_t i, int k, double shift) {
  if (k < 0 || k >= static_cast<int>(kPrimes.size()))
    throw std::invalid_argument("lattice_coord: dimension too large");
  const double g = std::sqrt(static_cast<double>(kPrimes[static_cast<size_t>(k)]));
  const double v = static_cast<double>(i + 1) * g + shift;
  return v - std::floor(v);
}

}  // namespace fsreach
