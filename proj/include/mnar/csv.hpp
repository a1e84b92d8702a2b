#pragma once

#include <string>
#include <vector>

#include "mnar/tables.hpp"

namespace mnar::io {

// Column layout is a subsequence of stratum,f,r,y,d,y_true with r and y
// mandatory. y must be empty exactly when r = 0.
struct Dataset {
  std::vector<model::UnitRecord> records;
  std::vector<int> y_true;  // parallel to records when the column is present
  bool has_stratum = false;
  bool has_f = false;
  bool has_d = false;
  bool has_y_true = false;
};

Dataset read_csv(const std::string& path, bool allow_y_true = false);
Dataset parse_csv(const std::string& text, const std::string& origin,
                  bool allow_y_true = false);

struct WriteOptions {
  bool stratum = false;
  bool f = true;
  bool d = false;
  bool y_true = false;
};

std::string format_csv(const std::vector<model::UnitRecord>& records,
                       const std::vector<int>& y_true, const WriteOptions& opt);
void write_csv(const std::string& path, const std::vector<model::UnitRecord>& records,
               const std::vector<int>& y_true, const WriteOptions& opt);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mnar::io
