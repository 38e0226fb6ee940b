// Copyright 2026 The adaptive-vmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AVMC_IO_HPP_
#define AVMC_IO_HPP_

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace avmc {

// Shortest round-trip decimal representation. Used for every number written
// to CSV/JSONL so reruns produce byte-identical files.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void log_warn(const std::string& msg) {
  std::cerr << "[warn] " << msg << "\n";
}

inline void log_info(const std::string& msg) {
  std::cerr << "[info] " << msg << "\n";
}

// Append-oriented CSV writer. The header is written once at construction.
class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header) {
    open(path, header);
  }

  void open(const std::filesystem::path& path,
            const std::vector<std::string>& header) {
    if (path.has_parent_path()) {
      std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    write_row_strings(header);
  }

  void write_row_strings(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    out_.flush();
  }

  void write_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(fmt_double(v));
    write_row_strings(s);
  }

  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
};

class JsonlWriter {
 public:
  JsonlWriter() = default;
  explicit JsonlWriter(const std::filesystem::path& path) { open(path); }

  void open(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
      std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open " + path.string());
  }

  // `line` must already be a serialized JSON object without trailing newline.
  void write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
  }

  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
}

}  // namespace avmc

#endif  // AVMC_IO_HPP_
