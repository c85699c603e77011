#pragma once

#include <string>

#include "cekab/compile.hpp"

namespace cekab {

/// The running-example ontology and its two-fact ABox.
const std::string& example1_tbox_text();
Tbox example1_tbox();
State example1_abox();

/// Task on the running example with the single move(x,y,z) action that
/// deletes on(x,y) and adds on_block(x,z) or on_table(x,z). Goal:
/// [on_block(b1,b3)].
CekabTask move_task();

struct BenchFiles {
  std::string name;
  std::string domain;
  std::string problem;
  std::string ontology;
};

/// Blocks instance with n blocks b1..bn on table t and the goal tower
/// b1 on b2 on ... on bn. Throws InvalidTask for n < 1.
BenchFiles blocks_files(int n);
CekabTask blocks_task(int n);

}  // namespace cekab
