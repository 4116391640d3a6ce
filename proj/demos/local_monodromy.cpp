// Compares the Frobenius description of a small loop around t = 1 with direct integration.
#include <veech/veech.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    const int k = argc > 1 ? std::atoi(argv[1]) : 2;
    const veech::PulledBackConnection conn(k);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const auto s = veech::adaptive_q_series(conn, 5, eps, 1e-14);
        const auto local = veech::loop_transport(s, std::polar(eps, 0.3));
        const auto ode = veech::ode_transport(conn, veech::loop_path(5, eps, 0.3)).value;
        std::printf("eps %.0e  order %d  |local - ode| = %.3e\n", eps, s.order(), (local - ode).norm());
    }
}
