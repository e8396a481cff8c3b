#pragma once

#include <string>
#include <vector>

#include "anyonlab/model.hpp"

namespace al {

// Z_N^(w). `twice_w` is 2w so that the half-integer family stays exact.
AnyonModel z_n(int n, int twice_w);
AnyonModel fib();
AnyonModel fib_bar();
AnyonModel ising();
AnyonModel trivial_model();

AnyonModel direct_product(const AnyonModel& left, const AnyonModel& right);
AnyonModel restrict_model(const AnyonModel& model, const std::vector<Index>& spectrum);

AnyonModel moore_read();
AnyonModel rr_bar_31();
AnyonModel hierarchy(int n, int m);

// Least odd positive p (mod 2m) with n p = 1 mod m.
int hierarchy_p(int n, int m);

// Accepts "ising", "fib", "fib_bar", "trivial", "moore_read", "rr_bar_31",
// "z_n(N,w)" with w like 3, 1/2 or 0.5, and "hierarchy(n,m)".
AnyonModel builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

}  // namespace al
