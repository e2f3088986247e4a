#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>

#include "faceprobe/core.hpp"

namespace fp {

// Self-describing binary field tree used by the model bundle format.
// File layout: magic "FPRB", u32 format version, root group fields, "FEND".
// Every field is [u8 type][u16 name_len][name][payload]; all integers are
// little-endian, floats are raw IEEE-754 bits (bit-exact round trips).

constexpr uint32_t kBundleFormatVersion = 1;

struct FieldNode {
  enum class Type : uint8_t { I64 = 1, F64 = 2, Str = 3, F64Array = 4, Group = 5 };

  Type type = Type::Group;
  std::string name;
  int64_t i64 = 0;
  double f64 = 0.0;
  std::string str;
  std::vector<uint32_t> dims;
  std::vector<double> data;
  std::vector<FieldNode> children;

  // Accessors raise a Data error naming the missing/mistyped field.
  const FieldNode& child(const std::string& name) const;
  const FieldNode* find(const std::string& name) const;
  std::vector<const FieldNode*> all(const std::string& name) const;
  int64_t get_i64(const std::string& name) const;
  double get_f64(const std::string& name) const;
  const std::string& get_str(const std::string& name) const;
  Eigen::MatrixXd get_matrix(const std::string& name) const;  // 2-D array
  Eigen::VectorXd get_vector(const std::string& name) const;  // 1-D array
};

class FieldWriter {
 public:
  void add_i64(const std::string& name, int64_t v);
  void add_f64(const std::string& name, double v);
  void add_str(const std::string& name, const std::string& v);
  void add_vector(const std::string& name, const Eigen::VectorXd& v);
  void add_matrix(const std::string& name, const Eigen::MatrixXd& m);
  void begin_group(const std::string& name);
  void end_group();

  // Serializes with header and end marker.
  std::string finish() const;

 private:
  FieldNode root_;
  std::vector<FieldNode*> stack_;
  FieldNode& top();
};

// Parses a full bundle payload; malformed or truncated input raises a Data
// error, a version mismatch names both versions.
FieldNode parse_bundle_bytes(const std::string& bytes);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace fp
