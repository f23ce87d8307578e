// Solves u(t) = 1 + int_0^t u(tau) dtau by Picard iteration and prints the
// terms next to their majorants.

#include <cmath>
#include <cstdio>

#include "volterra/oracle.hpp"
#include "volterra/picard.hpp"

using namespace volterra;

int main() {
    const TimeGrid grid(1.0, 512);
    const KernelSpec k = scalar_constant_kernel(1.0, grid);
    const auto space = k.space();
    const Trajectory f = Trajectory::sample(grid, space, [&](double) { return BanachElement(space, {1.0}); });

    SolveSettings s;
    s.tol = 1e-12;
    const NeumannResult r = neumann_solve(k, f, s);

    std::printf("%4s %22s %22s %10s\n", "n", "||psi_n||", "majorant", "ratio");
    for (std::size_t n = 0; n < r.report.term_norms.size(); ++n)
        std::printf("%4zu %22.15e %22.15e %10.6f\n", n, r.report.term_norms[n], r.report.majorants[n],
                    n < r.report.ratios.size() ? r.report.ratios[n] : 0.0);

    const Trajectory exact = reference_solution(ResolventExponential{1.0}, grid, space);
    std::printf("terms %zu, certified tail %.3e, residual %.3e, sup |u - e^t| %.3e\n", r.report.terms_used,
                r.report.certified_tail, r.report.residual, sup_distance(r.solution, exact));
}
