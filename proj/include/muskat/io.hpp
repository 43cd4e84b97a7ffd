#pragma once

#include <filesystem>

#include "muskat/field.hpp"

namespace muskat {

struct Snapshot {
    ScalarField field;
    double t = 0.0;
    double alpha = 0.0;
};

// Binary field snapshot: "MSKF", u32 version = 1, u32 nx, u32 ny, f64 lx, ly, t, alpha,
// then nx*ny f64 values row-major; all little-endian.
void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t, double alpha);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace muskat
