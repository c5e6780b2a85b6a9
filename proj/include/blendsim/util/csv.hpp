#pragma once

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace blendsim::util {

// Minimal CSV writer; cells are pre-formatted strings so numeric formatting
// stays under caller control (determinism requirement).
class CsvWriter {
 public:
  CsvWriter() = default;

  void open(const std::string& path, const std::vector<std::string>& header) {
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot open csv file: " + path);
    row(header);
  }

  bool is_open() const { return out_.is_open(); }

  void row(const std::vector<std::string>& cells) {
    if (!out_.is_open()) return;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() {
    if (out_.is_open()) out_.close();
  }

 private:
  std::ofstream out_;
};

}  // namespace blendsim::util
