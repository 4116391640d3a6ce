// Depth-two hyperlogarithms at x = 1 for every admissible pair of letters.
#include <veech/veech.hpp>

#include <cstdio>

int main() {
    const veech::HyperlogEngine<double> eng(veech::cplx(1.0, 0.0), 32);
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 4; ++b) {
            const auto v = eng.evaluate(veech::Word({a, b}));
            std::printf("L(%d,%d|1) = % .15f %+.15fi\n", a, b, v.real(), v.imag());
        }
}
