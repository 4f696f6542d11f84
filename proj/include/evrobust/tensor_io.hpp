#pragma once

#include <filesystem>
#include <iosfwd>

#include "evrobust/tensor.hpp"

namespace evrobust {

// T4 dump: header `T4 <B> <N> <H> <W>` followed by B*N*H*W whitespace-separated
// decimals in row-major order; shortest round-trip formatting. Used for golden
// files and as the section payload inside MRMW1 weight containers.
void write_tensor4(const Tensor4d& t, std::ostream& out);
Tensor4d read_tensor4(std::istream& in, const std::string& context);

void write_tensor4(const Tensor4d& t, const std::filesystem::path& path);
Tensor4d read_tensor4(const std::filesystem::path& path);

}  // namespace evrobust
