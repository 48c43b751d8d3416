#include "hisd/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace hisd::trace_io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const dynamics::IterationTrace& trace) {
  std::string out = "n,grad_norm,r_n,alpha_n,contraction,beta\n";
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.n);
    out += ',';
    out += format_double(rec.grad_norm);
    out += ',';
    if (rec.r) out += format_double(*rec.r);
    out += ',';
    if (rec.alpha) out += format_double(*rec.alpha);
    out += ',';
    if (rec.contraction) out += format_double(*rec.contraction);
    out += ',';
    out += format_double(rec.beta);
    out += '\n';
  }
  return out;
}

std::string plot_data(const dynamics::IterationTrace& trace) {
  std::string out;
  for (const auto& rec : trace.records) {
    if (!rec.r || !(*rec.r > 0.0)) continue;
    out += std::to_string(rec.n);
    out += ' ';
    out += format_double(std::log10(*rec.r));
    out += '\n';
  }
  return out;
}

std::string metadata_block(const dynamics::IterationTrace& trace) {
  std::string out;
  for (const auto& [key, value] : trace.metadata) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io_failure, "cannot open " + path + " for writing");
  f.write(content.data(), std::streamsize(content.size()));
  if (!f) fail(ErrorCode::io_failure, "short write to " + path);
}

} // namespace hisd::trace_io
