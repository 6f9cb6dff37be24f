// Compares the parallel exhaustive search against the serial reference on a batch
// of random geometric instances: asserts equal objectives and prints both runtimes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "corridor/instances.hpp"
#include "corridor/model.hpp"
#include "corridor/oracle.hpp"

namespace {

double run_ms(const std::vector<corridor::Instance>& batch, bool parallel,
              std::vector<int>& objectives) {
    const auto t0 = std::chrono::steady_clock::now();
    objectives.clear();
    for (const corridor::Instance& inst : batch) {
        const corridor::Solution sol =
            parallel ? corridor::brute_force(inst) : corridor::brute_force_serial(inst);
        objectives.push_back(sol.objective);
    }
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int count = 40;
    int n = 7;
    std::uint64_t seed = 7;
    if (argc > 1) count = std::atoi(argv[1]);
    if (argc > 2) n = std::atoi(argv[2]);
    if (argc > 3) seed = std::strtoull(argv[3], nullptr, 10);

    std::vector<corridor::Instance> batch;
    for (int k = 0; k < count; ++k)
        batch.push_back(corridor::generate_geometric({n, 12, seed + static_cast<std::uint64_t>(k)}));

    std::vector<int> serial_obj, parallel_obj;
    const double serial_ms = run_ms(batch, false, serial_obj);
    const double parallel_ms = run_ms(batch, true, parallel_obj);

    if (serial_obj != parallel_obj) {
        std::fprintf(stderr, "FAIL: parallel and serial objectives differ\n");
        return 1;
    }
    std::printf("instances: %d (n=%d)\n", count, n);
    std::printf("serial   : %9.1f ms\n", serial_ms);
    std::printf("parallel : %9.1f ms\n", parallel_ms);
    std::printf("speedup  : %9.2fx\n", parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
    return 0;
}
