#include "faceprobe/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace fp {

namespace {

void put_u16(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

struct Cursor {
  const std::string& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size())
      raise_data("model bundle: truncated or corrupt file (unexpected end of data)");
  }
  uint8_t u8() {
    need(1);
    return uint8_t(bytes[pos++]);
  }
  uint16_t u16() {
    need(2);
    uint16_t v = uint16_t(uint8_t(bytes[pos])) | uint16_t(uint8_t(bytes[pos + 1])) << 8;
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(bytes[pos + size_t(i)])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(bytes[pos + size_t(i)])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string raw(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

void write_node(std::string& out, const FieldNode& node) {
  out.push_back(char(node.type));
  put_u16(out, uint16_t(node.name.size()));
  out += node.name;
  switch (node.type) {
    case FieldNode::Type::I64:
      put_u64(out, uint64_t(node.i64));
      break;
    case FieldNode::Type::F64:
      put_f64(out, node.f64);
      break;
    case FieldNode::Type::Str:
      put_u32(out, uint32_t(node.str.size()));
      out += node.str;
      break;
    case FieldNode::Type::F64Array: {
      out.push_back(char(node.dims.size()));
      size_t total = 1;
      for (uint32_t d : node.dims) {
        put_u32(out, d);
        total *= d;
      }
      for (size_t i = 0; i < total; ++i) put_f64(out, node.data[i]);
      break;
    }
    case FieldNode::Type::Group:
      put_u32(out, uint32_t(node.children.size()));
      for (const auto& ch : node.children) write_node(out, ch);
      break;
  }
}

FieldNode read_node(Cursor& cur, int depth) {
  if (depth > 32) raise_data("model bundle: nesting too deep");
  FieldNode node;
  uint8_t type = cur.u8();
  if (type < 1 || type > 5) raise_data("model bundle: unknown field type tag");
  node.type = FieldNode::Type(type);
  node.name = cur.raw(cur.u16());
  switch (node.type) {
    case FieldNode::Type::I64:
      node.i64 = int64_t(cur.u64());
      break;
    case FieldNode::Type::F64:
      node.f64 = cur.f64();
      break;
    case FieldNode::Type::Str:
      node.str = cur.raw(cur.u32());
      break;
    case FieldNode::Type::F64Array: {
      uint8_t nd = cur.u8();
      if (nd > 4) raise_data("model bundle: array rank too large");
      size_t total = 1;
      for (int i = 0; i < nd; ++i) {
        node.dims.push_back(cur.u32());
        total *= node.dims.back();
      }
      if (total > (1u << 28)) raise_data("model bundle: array too large");
      node.data.resize(total);
      for (size_t i = 0; i < total; ++i) node.data[i] = cur.f64();
      break;
    }
    case FieldNode::Type::Group: {
      uint32_t count = cur.u32();
      node.children.reserve(count);
      for (uint32_t i = 0; i < count; ++i) node.children.push_back(read_node(cur, depth + 1));
      break;
    }
  }
  return node;
}

}  // namespace

const FieldNode* FieldNode::find(const std::string& key) const {
  for (const auto& ch : children)
    if (ch.name == key) return &ch;
  return nullptr;
}

const FieldNode& FieldNode::child(const std::string& key) const {
  const FieldNode* n = find(key);
  if (!n) raise_data("model bundle: missing field '" + key + "' in group '" + name + "'");
  return *n;
}

std::vector<const FieldNode*> FieldNode::all(const std::string& key) const {
  std::vector<const FieldNode*> out;
  for (const auto& ch : children)
    if (ch.name == key) out.push_back(&ch);
  return out;
}

int64_t FieldNode::get_i64(const std::string& key) const {
  const FieldNode& n = child(key);
  if (n.type != Type::I64) raise_data("model bundle: field '" + key + "' is not an integer");
  return n.i64;
}

double FieldNode::get_f64(const std::string& key) const {
  const FieldNode& n = child(key);
  if (n.type != Type::F64) raise_data("model bundle: field '" + key + "' is not a float");
  return n.f64;
}

const std::string& FieldNode::get_str(const std::string& key) const {
  const FieldNode& n = child(key);
  if (n.type != Type::Str) raise_data("model bundle: field '" + key + "' is not a string");
  return n.str;
}

Eigen::MatrixXd FieldNode::get_matrix(const std::string& key) const {
  const FieldNode& n = child(key);
  if (n.type != Type::F64Array || n.dims.size() != 2)
    raise_data("model bundle: field '" + key + "' is not a 2-D array");
  Eigen::MatrixXd m(n.dims[0], n.dims[1]);
  for (uint32_t r = 0; r < n.dims[0]; ++r)
    for (uint32_t c = 0; c < n.dims[1]; ++c) m(r, c) = n.data[size_t(r) * n.dims[1] + c];
  return m;
}

Eigen::VectorXd FieldNode::get_vector(const std::string& key) const {
  const FieldNode& n = child(key);
  if (n.type != Type::F64Array || n.dims.size() != 1)
    raise_data("model bundle: field '" + key + "' is not a 1-D array");
  return Eigen::Map<const Eigen::VectorXd>(n.data.data(), long(n.data.size()));
}

FieldNode& FieldWriter::top() { return stack_.empty() ? root_ : *stack_.back(); }

void FieldWriter::add_i64(const std::string& name, int64_t v) {
  FieldNode n;
  n.type = FieldNode::Type::I64;
  n.name = name;
  n.i64 = v;
  top().children.push_back(std::move(n));
}

void FieldWriter::add_f64(const std::string& name, double v) {
  FieldNode n;
  n.type = FieldNode::Type::F64;
  n.name = name;
  n.f64 = v;
  top().children.push_back(std::move(n));
}

void FieldWriter::add_str(const std::string& name, const std::string& v) {
  FieldNode n;
  n.type = FieldNode::Type::Str;
  n.name = name;
  n.str = v;
  top().children.push_back(std::move(n));
}

void FieldWriter::add_vector(const std::string& name, const Eigen::VectorXd& v) {
  FieldNode n;
  n.type = FieldNode::Type::F64Array;
  n.name = name;
  n.dims = {uint32_t(v.size())};
  n.data.assign(v.data(), v.data() + v.size());
  top().children.push_back(std::move(n));
}

void FieldWriter::add_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  FieldNode n;
  n.type = FieldNode::Type::F64Array;
  n.name = name;
  n.dims = {uint32_t(m.rows()), uint32_t(m.cols())};
  n.data.resize(size_t(m.rows()) * size_t(m.cols()));
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c) n.data[size_t(r) * size_t(m.cols()) + size_t(c)] = m(r, c);
  top().children.push_back(std::move(n));
}

void FieldWriter::begin_group(const std::string& name) {
  FieldNode n;
  n.type = FieldNode::Type::Group;
  n.name = name;
  top().children.push_back(std::move(n));
  stack_.push_back(&top().children.back());
}

void FieldWriter::end_group() {
  if (stack_.empty()) raise_data("FieldWriter: end_group without begin_group");
  stack_.pop_back();
}

std::string FieldWriter::finish() const {
  std::string out = "FPRB";
  put_u32(out, kBundleFormatVersion);
  put_u32(out, uint32_t(root_.children.size()));
  for (const auto& ch : root_.children) write_node(out, ch);
  out += "FEND";
  return out;
}

FieldNode parse_bundle_bytes(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "FPRB") != 0)
    raise_data("model bundle: bad magic bytes (not a FPRB model file)");
  Cursor cur{bytes, 4};
  uint32_t version = cur.u32();
  if (version != kBundleFormatVersion)
    raise_data("model bundle: format version mismatch (file has " + std::to_string(version) +
               ", this build reads " + std::to_string(kBundleFormatVersion) + ")");
  FieldNode root;
  root.type = FieldNode::Type::Group;
  uint32_t count = cur.u32();
  root.children.reserve(count);
  for (uint32_t i = 0; i < count; ++i) root.children.push_back(read_node(cur, 0));
  if (cur.pos + 4 != bytes.size() || bytes.compare(cur.pos, 4, "FEND") != 0)
    raise_data("model bundle: missing end marker (truncated or corrupt file)");
  return root;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise_data(path + ": cannot open for writing");
    out.write(bytes.data(), long(bytes.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      raise_data(path + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise_data(path + ": atomic rename failed");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise_data(path + ": cannot open file");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace fp
