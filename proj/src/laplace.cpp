#include "levy/laplace.hpp"

#include <cmath>

namespace levy {

namespace {

using int128 = __int128;
using ldouble = long double;
using qfloat = __float128;

// ln 2 as a double-double pair, accurate well beyond quad rounding needs
constexpr double kLn2Hi = 6.93147180559945286227e-01;
constexpr double kLn2Lo = 2.31904681384629956e-17;

int128 binom128(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    int128 r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

int128 ipow128(int b, int e) {
    int128 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

qfloat to_qfloat(int128 v) {
    const bool neg = v < 0;
    if (neg) v = -v;
    qfloat r = 0, scale = 1;
    while (v > 0) {
        r += scale * static_cast<qfloat>(static_cast<long long>(v % 1000000000));
        v /= 1000000000;
        scale *= 1e9;
    }
    return neg ? -r : r;
}

ldouble to_ldouble(int128 v) { return static_cast<ldouble>(to_qfloat(v)); }

qfloat qabs(qfloat x) { return x < 0 ? -x : x; }

// Gaver functionals f_j(T) = (j ln2/T) C(2j,j) sum_l (-1)^l C(j,l) ft((j+l) ln2/T);
// the alternating sum cancels heavily, so it is accumulated in quad precision
std::vector<qfloat> gaver_functionals(const std::vector<ldouble>& ft, double T, int N) {
    const qfloat ln2 = static_cast<qfloat>(kLn2Hi) + static_cast<qfloat>(kLn2Lo);
    std::vector<qfloat> f(N);
    for (int j = 1; j <= N; ++j) {
        qfloat acc = 0;
        qfloat sign = 1;
        for (int l = 0; l <= j; ++l) {
            acc += sign * to_qfloat(binom128(j, l)) * static_cast<qfloat>(ft[j + l - 1]);
            sign = -sign;
        }
        f[j - 1] = (j * ln2 / T) * to_qfloat(binom128(2 * j, j)) * acc;
    }
    return f;
}

}  // namespace

std::vector<double> gs_coefficients(int M) {
    if (M < 1) throw DomainError("gs_coefficients: M must be positive");
    if (M > 9) throw CapabilityError("gs_coefficients: M > 9 needs high-precision arithmetic");
    std::vector<double> zeta(2 * M);
    int128 mfact = 1;
    for (int j = 2; j <= M; ++j) mfact *= j;
    for (int k = 1; k <= 2 * M; ++k) {
        int128 num = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, M); ++j)
            num += ipow128(j, M + 1) * binom128(M, j) * binom128(2 * j, j) * binom128(j, k - j);
        double v = static_cast<double>(to_ldouble(num) / to_ldouble(mfact));
        if ((M + k) % 2 != 0) v = -v;
        zeta[k - 1] = v;
    }
    return zeta;
}

double invert_from_samples(const std::vector<long double>& ft, double T,
                           const GaverScheme& scheme, bool* degraded) {
    if (!(T > 0)) throw DomainError("invert: T must be positive");
    if (degraded) *degraded = false;
    if (scheme.mode == GaverScheme::Mode::PlainGS) {
        const int M = scheme.M;
        if (M < 1) throw DomainError("invert: M must be positive");
        if (M > 9) throw CapabilityError("invert: M > 9 needs high-precision arithmetic");
        if (static_cast<int>(ft.size()) < 2 * M) throw DomainError("invert: not enough samples");
        int128 mfact = 1;
        for (int j = 2; j <= M; ++j) mfact *= j;
        qfloat acc = 0;
        for (int k = 1; k <= 2 * M; ++k) {
            int128 num = 0;
            for (int j = (k + 1) / 2; j <= std::min(k, M); ++j)
                num += ipow128(j, M + 1) * binom128(M, j) * binom128(2 * j, j) *
                       binom128(j, k - j);
            qfloat zk = to_qfloat(num) / to_qfloat(mfact);
            if ((M + k) % 2 != 0) zk = -zk;
            acc += zk * static_cast<qfloat>(ft[k - 1]);
        }
        const qfloat ln2 = static_cast<qfloat>(kLn2Hi) + static_cast<qfloat>(kLn2Lo);
        return static_cast<double>(static_cast<ldouble>(ln2 / T * acc));
    }
    const bool paper_depth = scheme.depth == GaverScheme::Depth::PaperDepth;
    const int N = paper_depth ? scheme.M : scheme.N_wynn;
    if (N < 4 || N % 2 != 0) throw DomainError("invert: functional count must be even and >= 4");
    if (static_cast<int>(ft.size()) < 2 * N) throw DomainError("invert: not enough samples");
    const auto f = gaver_functionals(ft, T, N);

    // Wynn's rho: rho^j_{-1} = 0, rho^j_0 = f_j,
    // rho^j_k = rho^{j+1}_{k-2} + k / (rho^{j+1}_{k-1} - rho^j_{k-1});
    // the accelerated estimates sit in the even columns
    std::vector<qfloat> prev2(N + 1, 0), prev1(N + 1, 0);
    for (int j = 1; j <= N; ++j) prev1[j] = f[j - 1];
    std::vector<double> heads;
    bool hit_zero = false;
    for (int k = 1; k <= N - 1 && !hit_zero; ++k) {
        std::vector<qfloat> cur(N + 1, 0);
        for (int j = 1; j <= N - k; ++j) {
            const qfloat den = prev1[j + 1] - prev1[j];
            const qfloat tiny = 1e-18 * (qfloat(1) + qabs(prev1[j + 1]));
            if (qabs(den) <= tiny || !std::isfinite(static_cast<double>(den))) {
                hit_zero = true;
                break;
            }
            cur[j] = prev2[j + 1] + qfloat(k) / den;
        }
        if (hit_zero) break;
        if (k % 2 == 0) heads.push_back(static_cast<double>(cur[1]));
        prev2.swap(prev1);
        prev1.swap(cur);
    }
    if (heads.empty()) {
        if (degraded) *degraded = true;
        return static_cast<double>(static_cast<ldouble>(f[0]));
    }
    if (hit_zero && degraded) *degraded = true;
    if (paper_depth) return heads.back();  // deepest even column of the M-table
    if (heads.size() < 3) return heads.back();
    // pick the first column where successive differences stop improving
    for (size_t i = 2; i + 1 < heads.size(); ++i) {
        const double d_here = std::abs(heads[i] - heads[i - 1]);
        const double d_next = std::abs(heads[i + 1] - heads[i]);
        if (d_here <= d_next) return heads[i];
    }
    return heads[heads.size() - 2];
}

double invert_from_samples(const std::vector<double>& ft, double T, const GaverScheme& scheme,
                           bool* degraded) {
    std::vector<long double> up(ft.begin(), ft.end());
    return invert_from_samples(up, T, scheme, degraded);
}

double invert(const std::function<double(double)>& ft, double T, const GaverScheme& scheme,
              bool* degraded) {
    const double ln2 = std::log(2.0);
    const int n = scheme.sample_count();
    std::vector<long double> samples(n);
    for (int k = 1; k <= n; ++k) samples[k - 1] = ft(k * ln2 / T);
    return invert_from_samples(samples, T, scheme, degraded);
}

double invert_ld(const std::function<long double(long double)>& ft, double T,
                 const GaverScheme& scheme, bool* degraded) {
    const long double ln2 = std::log(2.0L);
    const int n = scheme.sample_count();
    std::vector<long double> samples(n);
    for (int k = 1; k <= n; ++k) samples[k - 1] = ft(k * ln2 / static_cast<long double>(T));
    return invert_from_samples(samples, T, scheme, degraded);
}

}  // namespace levy
