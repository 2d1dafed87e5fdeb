// One full rotation under each structure for H = 1/2 |x|^2, n = 1.
// Prints the final point and energy drift for both integrators.

#include <cstdio>

#include "qkham/qkham.hpp"

int main() {
    using namespace qkham;
    const auto h = parse("0.5*(x1^2+x2^2+x3^2+x4^2)", BlockDim(1));
    std::printf("%-6s %-18s %-44s %s\n", "label", "method", "final point", "energy drift");
    for (Label label : kLabels) {
        const HamiltonianSystem system(label, h);
        for (Method method : {Method::Rk4, Method::ImplicitMidpoint}) {
            const auto traj = integrate(system, PhasePoint({1, 0, 0, 0}, 0.0), 0.01, 628, method);
            const auto& x = traj.points.back().coordinates();
            std::printf("%-6s %-18s (%9.6f, %9.6f, %9.6f, %9.6f)  %.3e\n", std::string(to_string(label)).c_str(),
                        std::string(to_string(method)).c_str(), x[0], x[1], x[2], x[3],
                        energy_drift(traj, h).max);
        }
    }
}
