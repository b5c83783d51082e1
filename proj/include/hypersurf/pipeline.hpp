#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hypersurf/config.hpp"
#include "hypersurf/dimension.hpp"
#include "hypersurf/fractal.hpp"
#include "hypersurf/measure.hpp"

namespace hypersurf {

struct RunOptions {
    Exec exec = Exec::parallel;
    std::ostream* verbose = nullptr;  // progress messages, when set
};

/// Rows "x,y,f" (or "x,f" for n = 1) in lexicographic lattice order with 17 significant digits.
void write_surface_csv(const GridFunction& f, std::ostream& out);

/// `v x y z` lines in lattice order then 1-based `f i j k` faces over the depth-m
/// cells. For n = 1 the vertices are `v x 0 f` joined by `l i j` segments.
void write_surface_obj(const GridFunction& f, std::ostream& out);

struct SurfaceSummary {
    std::filesystem::path dir;
    std::size_t rows = 0;
    int iterations = 0;
    double last_residual = 0.0;
    double error_bound = 0.0;
};

/// Writes surface.csv, surface.obj and manifest.json into config.out.
SurfaceSummary run_surface(const RunConfig& config, std::ostream& out, const RunOptions& options = {});

/// Writes chaos_base.csv and chaos_graph.csv (rows sorted by position).
void run_chaos(const RunConfig& config, std::ostream& out, const RunOptions& options = {});

/// Writes boxcount.csv and oscillation.csv and prints the dimension tables.
void run_dim(const RunConfig& config, std::ostream& out, const RunOptions& options = {});

/// Writes measure.csv (region estimates) and pieces.csv (depth-1 piece masses).
void run_measure(const RunConfig& config, std::ostream& out, const RunOptions& options = {});

/// Runs every hard check and prints a deterministic report; returns the process exit
/// status (0 iff all hard checks pass). The report is also written to verify.txt.
int run_verify(const RunConfig& config, std::ostream& out, const RunOptions& options = {});

/// Same, with the partition supplied by the caller instead of built from the config.
int run_verify(const RunConfig& config, const Partition& partition, std::ostream& out,
               const RunOptions& options = {});

}  // namespace hypersurf
