#include "mnar/csv.hpp"

#include <fstream>
#include <sstream>

#include "mnar/error.hpp"

namespace mnar::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

int parse_int(const std::string& field, const std::string& what, long line_no) {
  require(!field.empty(), Errc::io,
          "line " + std::to_string(line_no) + ": empty " + what + " field");
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == field.size(), Errc::io,
          "line " + std::to_string(line_no) + ": malformed " + what + " value '" + field + "'");
  return value;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& origin, bool allow_y_true) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::io, origin + ": empty file");

  static const std::vector<std::string> kSchema = {"stratum", "f", "r", "y", "d", "y_true"};
  std::vector<std::string> header = split_line(line);
  std::vector<int> column(header.size(), -1);
  int last = -1;
  bool seen[6] = {false, false, false, false, false, false};
  for (std::size_t i = 0; i < header.size(); ++i) {
    int slot = -1;
    for (std::size_t k = 0; k < kSchema.size(); ++k)
      if (kSchema[k] == header[i]) slot = static_cast<int>(k);
    require(slot >= 0, Errc::io, origin + ": unknown column '" + header[i] + "'");
    require(!seen[slot], Errc::io, origin + ": duplicate column '" + header[i] + "'");
    require(slot > last, Errc::io,
            origin + ": column '" + header[i] +
                "' out of order (expected subsequence of stratum,f,r,y,d,y_true)");
    column[i] = slot;
    seen[slot] = true;
    last = slot;
  }
  require(seen[2] && seen[3], Errc::io, origin + ": columns r and y are mandatory");
  require(allow_y_true || !seen[5], Errc::io,
          origin + ": column y_true is only accepted by the benchmark command");

  Dataset data;
  data.has_stratum = seen[0];
  data.has_f = seen[1];
  data.has_d = seen[4];
  data.has_y_true = seen[5];

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_line(line);
    require(fields.size() == header.size(), Errc::io,
            "line " + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " fields, got " +
                std::to_string(fields.size()));
    model::UnitRecord rec;
    rec.f = 0;
    int truth = 0;
    std::string y_field;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      switch (column[i]) {
        case 0: rec.stratum = fields[i]; break;
        case 1: rec.f = parse_int(fields[i], "f", line_no); break;
        case 2: rec.r = parse_int(fields[i], "r", line_no); break;
        case 3: y_field = fields[i]; break;
        case 4:
          rec.d = fields[i].empty() ? -1 : parse_int(fields[i], "d", line_no);
          break;
        default: truth = parse_int(fields[i], "y_true", line_no); break;
      }
    }
    require(rec.r == 0 || rec.r == 1, Errc::io,
            "line " + std::to_string(line_no) + ": r must be 0 or 1");
    if (rec.r == 1) {
      rec.y = parse_int(y_field, "y", line_no);
    } else {
      require(y_field.empty(), Errc::io,
              "line " + std::to_string(line_no) + ": y must be empty when r = 0");
      rec.y = 0;
    }
    data.records.push_back(std::move(rec));
    if (data.has_y_true) data.y_true.push_back(truth);
  }
  require(!data.records.empty(), Errc::io, origin + ": no data rows");
  return data;
}

Dataset read_csv(const std::string& path, bool allow_y_true) {
  return parse_csv(read_text_file(path), path, allow_y_true);
}

std::string format_csv(const std::vector<model::UnitRecord>& records,
                       const std::vector<int>& y_true, const WriteOptions& opt) {
  require(!opt.y_true || y_true.size() == records.size(), Errc::contract,
          "csv: truth column length mismatch");
  std::string out;
  bool first = true;
  auto col = [&](const std::string& name) {
    if (!first) out += ',';
    out += name;
    first = false;
  };
  if (opt.stratum) col("stratum");
  if (opt.f) col("f");
  col("r");
  col("y");
  if (opt.d) col("d");
  if (opt.y_true) col("y_true");
  out += '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    std::string row;
    if (opt.stratum) row += rec.stratum + ",";
    if (opt.f) row += std::to_string(rec.f) + ",";
    row += std::to_string(rec.r) + ",";
    if (rec.r == 1) row += std::to_string(rec.y);
    if (opt.d) row += "," + std::to_string(rec.d);
    if (opt.y_true) row += "," + std::to_string(y_true[i]);
    out += row + "\n";
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<model::UnitRecord>& records,
               const std::vector<int>& y_true, const WriteOptions& opt) {
  write_text_file(path, format_csv(records, y_true, opt));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io, "cannot write " + path);
  out << content;
  require(out.good(), Errc::io, "write failed for " + path);
}

}  // namespace mnar::io
