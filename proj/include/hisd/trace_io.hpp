#pragma once

#include <string>

#include "hisd/dynamics.hpp"

namespace hisd::trace_io {

/// Shortest round-trip decimal form of a double; the one formatting used by
/// every emitted file so identical runs stay byte-identical.
std::string format_double(double x);

/// CSV with header `n,grad_norm,r_n,alpha_n,contraction,beta`; absent
/// optional fields become empty cells.
std::string trace_csv(const dynamics::IterationTrace& trace);

/// Two-column plot data `n log10_r_n`, skipping records without positive r.
std::string plot_data(const dynamics::IterationTrace& trace);

/// `key = value` lines of the run metadata.
std::string metadata_block(const dynamics::IterationTrace& trace);

void write_file(const std::string& path, const std::string& content);

} // namespace hisd::trace_io
