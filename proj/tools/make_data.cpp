// Writes the frozen Example-1 models into a directory.

#include <cstdio>
#include <string>

#include "sparsevar/errors.hpp"
#include "sparsevar/io.hpp"
#include "sparsevar/simlab.hpp"

using namespace sparsevar;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <dir>\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  try {
    for (auto v : {Example1Variant::kDM, Example1Variant::kDT, Example1Variant::kFM,
                   Example1Variant::kFT}) {
      const VarModel m(example1_coefficients(), example1_sigma(v));
      Provenance header{
          "example 1, variant " + variant_name(v),
          "random_sparse_varp(d=14, s=5, rho=0.8, p=4, seed=" + std::to_string(kExample1Seed) + ")"};
      save_model(dir + "/example1_" + variant_name(v) + ".model", m, header);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.error_class());
  }
  return 0;
}
