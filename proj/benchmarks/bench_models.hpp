#pragma once

#include <cstdint>

#include "cherryvine/bicop.hpp"
#include "cherryvine/vine.hpp"

namespace bench {

// D-vine with alternating families and tau shrinking by level.
inline cherryvine::VineModel mixed_d_vine(int d) {
  using namespace cherryvine;
  const auto structure = d_vine_structure(d);
  std::vector<std::vector<BivariateCopula>> copulas;
  const Family cycle[] = {Family::Gaussian, Family::Clayton, Family::Gumbel, Family::Frank};
  for (int level = 1; level <= structure.level_count(); ++level) {
    auto& row = copulas.emplace_back();
    const double tau = 0.6 / level;
    for (std::size_t i = 0; i < structure.labels(level).size(); ++i) {
      row.push_back(tau_to_param(cycle[(static_cast<std::size_t>(level) + i) % 4], tau));
    }
  }
  return VineModel(structure, std::move(copulas));
}

}  // namespace bench
