#include "sitemap/mathfn.hpp"

namespace sitemap {
namespace {

// Cody's CALERF coefficient sets.
constexpr double kA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                          3.77485237685302021e+02, 3.20937758913846947e+03,
                          1.85777706184603153e-01};
constexpr double kB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                          1.28261652607737228e+03, 2.84423683343917062e+03};

constexpr double kC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                          6.61191906371416295e+01, 2.98635138197400131e+02,
                          8.81952221241769090e+02, 1.71204761263407058e+03,
                          2.05107837782607147e+03, 1.23033935479799725e+03,
                          2.15311535474403846e-08};
constexpr double kD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                          5.37181101862009858e+02, 1.62138957456669019e+03,
                          3.29079923573345963e+03, 4.36261909014324716e+03,
                          3.43936767414372164e+03, 1.23033935480374942e+03};

constexpr double kP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                          1.25781726111229246e-01, 1.60837851487422766e-02,
                          6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                          5.27905102951428412e-01, 6.05183413124413191e-02,
                          2.33520497626869185e-03};

constexpr double kInvSqrtPi = 5.6418958354775628695e-01;
constexpr double kErfSplit = 0.46875;

// erf on [0, 0.46875].
double erf_small(double x) {
    double z = x * x;
    double num = kA[4] * z;
    double den = z;
    for (int i = 0; i < 3; ++i) {
        num = (num + kA[i]) * z;
        den = (den + kB[i]) * z;
    }
    return x * (num + kA[3]) / (den + kB[3]);
}

// exp(-y^2) split into an exactly representable square plus a correction,
// which preserves accuracy of erfc deep in the tail.
double exp_neg_sq(double y) {
    double ysq = std::trunc(y * 16.0) / 16.0;
    double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc on (0.46875, 4].
double erfc_mid(double y) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
        num = (num + kC[i]) * y;
        den = (den + kD[i]) * y;
    }
    return exp_neg_sq(y) * (num + kC[7]) / (den + kD[7]);
}

// erfc on (4, inf).
double erfc_large(double y) {
    if (y > 26.6) return 0.0; // below smallest normal double
    double z = 1.0 / (y * y);
    double num = kP[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * z;
        den = (den + kQ[i]) * z;
    }
    double r = z * (num + kP[4]) / (den + kQ[4]);
    return exp_neg_sq(y) * (kInvSqrtPi - r) / y;
}

double erfc_positive(double y) {
    if (y <= kErfSplit) return 1.0 - erf_small(y);
    if (y <= 4.0) return erfc_mid(y);
    return erfc_large(y);
}

} // namespace

double erf_cody(double x) {
    if (std::isnan(x)) return x;
    double y = std::fabs(x);
    if (y <= kErfSplit) return erf_small(x);
    double r = 1.0 - erfc_positive(y);
    return x < 0.0 ? -r : r;
}

double erfc_cody(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc_positive(-x);
    return erfc_positive(x);
}

} // namespace sitemap
