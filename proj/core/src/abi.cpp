#include "phishscan/abi.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "phishscan/keccak.hpp"

namespace phishscan::abi {

namespace {

constexpr std::size_t kMaxDepth = 16;

std::vector<std::string_view> split_top_level(std::string_view inner) {
  std::vector<std::string_view> parts;
  if (inner.empty()) return parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '(') ++depth;
    else if (inner[i] == ')') --depth;
    else if (inner[i] == ',' && depth == 0) {
      parts.push_back(inner.substr(start, i - start));
      start = i + 1;
    }
    if (depth < 0) throw ParseError("unbalanced parentheses in ABI type");
  }
  if (depth != 0) throw ParseError("unbalanced parentheses in ABI type");
  parts.push_back(inner.substr(start));
  return parts;
}

unsigned parse_width(std::string_view digits, unsigned fallback) {
  if (digits.empty()) return fallback;
  unsigned v = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ParseError("bad ABI type width '" + std::string(digits) + "'");
    v = v * 10 + static_cast<unsigned>(c - '0');
    if (v > 1024) throw ParseError("ABI type width too large");
  }
  return v;
}

Type parse_type_impl(std::string_view text, std::size_t depth) {
  if (depth > kMaxDepth) throw ParseError("ABI type nested too deeply");
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty ABI type");
  if (text.back() == ']') {
    const auto open = text.rfind('[');
    if (open == std::string_view::npos) throw ParseError("bad array type '" + std::string(text) + "'");
    Type t;
    t.kind = Type::Kind::Array;
    const auto len = text.substr(open + 1, text.size() - open - 2);
    if (!len.empty()) {
      t.length = parse_width(len, 0);
      if (*t.length == 0) throw ParseError("zero-length fixed array");
    }
    t.components.push_back(parse_type_impl(text.substr(0, open), depth + 1));
    return t;
  }
  if (text.front() == '(') {
    if (text.back() != ')') throw ParseError("bad tuple type '" + std::string(text) + "'");
    Type t;
    t.kind = Type::Kind::Tuple;
    for (auto part : split_top_level(text.substr(1, text.size() - 2))) t.components.push_back(parse_type_impl(part, depth + 1));
    return t;
  }
  Type t;
  auto starts = [&](std::string_view p) { return text.substr(0, p.size()) == p; };
  if (text == "address") {
    t.kind = Type::Kind::Address;
  } else if (text == "bool") {
    t.kind = Type::Kind::Bool;
  } else if (text == "string") {
    t.kind = Type::Kind::String;
  } else if (text == "bytes") {
    t.kind = Type::Kind::Bytes;
  } else if (starts("bytes")) {
    t.kind = Type::Kind::FixedBytes;
    t.width = parse_width(text.substr(5), 0);
    if (t.width == 0 || t.width > 32) throw ParseError("bad fixed bytes width");
  } else if (starts("uint")) {
    t.kind = Type::Kind::Uint;
    t.width = parse_width(text.substr(4), 256);
  } else if (starts("int")) {
    t.kind = Type::Kind::Int;
    t.width = parse_width(text.substr(3), 256);
  } else {
    throw ParseError("unsupported ABI type '" + std::string(text) + "'");
  }
  if ((t.kind == Type::Kind::Uint || t.kind == Type::Kind::Int) && (t.width == 0 || t.width > 256 || t.width % 8))
    throw ParseError("bad integer width in '" + std::string(text) + "'");
  return t;
}

struct Reader {
  ByteView data;

  [[nodiscard]] ByteView word(std::size_t at) const {
    if (at > data.size() || data.size() - at < 32) throw DecodeError("calldata truncated");
    return data.subspan(at, 32);
  }

  [[nodiscard]] std::size_t offset(std::size_t at) const {
    const U256 v = u256_from_be(word(at));
    if (v > data.size()) throw DecodeError("offset beyond calldata");
    return static_cast<std::size_t>(v);
  }
};

Value decode_one(const Type& t, ByteView data, std::size_t at, std::size_t depth);

std::vector<Value> decode_sequence(const std::vector<Type>& types, ByteView data, std::size_t depth) {
  if (depth > kMaxDepth) throw DecodeError("ABI value nested too deeply");
  Reader r{data};
  std::vector<Value> out;
  out.reserve(types.size());
  std::size_t head = 0;
  for (const auto& t : types) {
    if (t.is_dynamic()) {
      const std::size_t off = r.offset(head);
      out.push_back(decode_one(t, data.subspan(off), 0, depth + 1));
      head += 32;
    } else {
      out.push_back(decode_one(t, data, head, depth + 1));
      head += t.head_size();
    }
  }
  return out;
}

Value decode_one(const Type& t, ByteView data, std::size_t at, std::size_t depth) {
  Reader r{data};
  switch (t.kind) {
    case Type::Kind::Uint: {
      const auto w = r.word(at);
      const std::size_t lead = (256 - t.width) / 8;
      for (std::size_t i = 0; i < lead; ++i)
        if (w[i] != 0) throw DecodeError("uint" + std::to_string(t.width) + " out of range");
      return make_uint(u256_from_be(w));
    }
    case Type::Kind::Int:
      // Signed values are carried as their two's-complement word; the rules never read them.
      return make_uint(u256_from_be(r.word(at)));
    case Type::Kind::Address:
      return make_address(address_from_word(r.word(at)));
    case Type::Kind::Bool: {
      const U256 v = u256_from_be(r.word(at));
      if (v > 1) throw DecodeError("bool out of range");
      return make_bool(v == 1);
    }
    case Type::Kind::FixedBytes: {
      const auto w = r.word(at);
      return make_bytes(Bytes(w.begin(), w.begin() + t.width));
    }
    case Type::Kind::Bytes:
    case Type::Kind::String: {
      const U256 len = u256_from_be(r.word(at));
      if (len > data.size() - at - 32) throw DecodeError("bytes length beyond calldata");
      const auto n = static_cast<std::size_t>(len);
      return make_bytes(Bytes(data.begin() + at + 32, data.begin() + at + 32 + n));
    }
    case Type::Kind::Array: {
      std::size_t count;
      ByteView body;
      if (t.length) {
        count = *t.length;
        body = data.subspan(at);
      } else {
        const U256 len = u256_from_be(r.word(at));
        // Each element needs at least one word, which bounds hostile lengths.
        if (len > (data.size() - at - 32) / 32) throw DecodeError("array length beyond calldata");
        count = static_cast<std::size_t>(len);
        body = data.subspan(at + 32);
      }
      std::vector<Type> elems(count, t.components.front());
      return make_list(decode_sequence(elems, body, depth));
    }
    case Type::Kind::Tuple:
      return make_list(decode_sequence(t.components, data.subspan(std::min(at, data.size())), depth));
  }
  throw DecodeError("unreachable ABI kind");
}

void append_word(Bytes& out, const U256& v) {
  const auto w = u256_to_be(v);
  out.insert(out.end(), w.begin(), w.end());
}

Bytes encode_sequence(const std::vector<Type>& types, const std::vector<Value>& values);

Bytes encode_one(const Type& t, const Value& v) {
  Bytes out;
  switch (t.kind) {
    case Type::Kind::Uint:
    case Type::Kind::Int: {
      const U256& x = v.uint();
      if (t.kind == Type::Kind::Uint && t.width < 256 && (x >> t.width) != 0)
        throw DecodeError("value does not fit uint" + std::to_string(t.width));
      append_word(out, x);
      return out;
    }
    case Type::Kind::Address: {
      out.insert(out.end(), 12, 0);
      const auto& a = v.address().bytes();
      out.insert(out.end(), a.begin(), a.end());
      return out;
    }
    case Type::Kind::Bool:
      append_word(out, v.boolean() ? 1 : 0);
      return out;
    case Type::Kind::FixedBytes: {
      const auto& b = v.bytes();
      if (b.size() != t.width) throw DecodeError("fixed bytes width mismatch");
      out.insert(out.end(), b.begin(), b.end());
      out.insert(out.end(), 32 - b.size(), 0);
      return out;
    }
    case Type::Kind::Bytes:
    case Type::Kind::String: {
      const auto& b = v.bytes();
      append_word(out, b.size());
      out.insert(out.end(), b.begin(), b.end());
      out.insert(out.end(), (32 - b.size() % 32) % 32, 0);
      return out;
    }
    case Type::Kind::Array: {
      const auto& items = v.items();
      if (t.length && items.size() != *t.length) throw DecodeError("fixed array length mismatch");
      if (!t.length) append_word(out, items.size());
      std::vector<Type> elems(items.size(), t.components.front());
      auto body = encode_sequence(elems, items);
      out.insert(out.end(), body.begin(), body.end());
      return out;
    }
    case Type::Kind::Tuple:
      return encode_sequence(t.components, v.items());
  }
  throw DecodeError("unreachable ABI kind");
}

Bytes encode_sequence(const std::vector<Type>& types, const std::vector<Value>& values) {
  if (types.size() != values.size()) throw DecodeError("argument count mismatch");
  std::size_t head_len = 0;
  for (const auto& t : types) head_len += t.is_dynamic() ? 32 : t.head_size();
  Bytes head, tail;
  for (std::size_t i = 0; i < types.size(); ++i) {
    auto enc = encode_one(types[i], values[i]);
    if (types[i].is_dynamic()) {
      append_word(head, head_len + tail.size());
      tail.insert(tail.end(), enc.begin(), enc.end());
    } else {
      head.insert(head.end(), enc.begin(), enc.end());
    }
  }
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::string json_param_type(const nlohmann::json& p) {
  const std::string type = p.at("type").get<std::string>();
  if (type.rfind("tuple", 0) != 0) return type;
  std::string inner = "(";
  bool first = true;
  for (const auto& c : p.at("components")) {
    if (!first) inner += ',';
    first = false;
    inner += json_param_type(c);
  }
  return inner + ")" + type.substr(5);
}

}  // namespace

bool Type::is_dynamic() const {
  switch (kind) {
    case Kind::Bytes:
    case Kind::String:
      return true;
    case Kind::Array:
      return !length || components.front().is_dynamic();
    case Kind::Tuple:
      for (const auto& c : components)
        if (c.is_dynamic()) return true;
      return false;
    default:
      return false;
  }
}

std::size_t Type::head_size() const {
  if (is_dynamic()) return 32;
  if (kind == Kind::Array) return *length * components.front().head_size();
  if (kind == Kind::Tuple) {
    std::size_t n = 0;
    for (const auto& c : components) n += c.head_size();
    return n;
  }
  return 32;
}

std::string Type::canonical() const {
  switch (kind) {
    case Kind::Uint: return "uint" + std::to_string(width);
    case Kind::Int: return "int" + std::to_string(width);
    case Kind::Address: return "address";
    case Kind::Bool: return "bool";
    case Kind::FixedBytes: return "bytes" + std::to_string(width);
    case Kind::Bytes: return "bytes";
    case Kind::String: return "string";
    case Kind::Array:
      return components.front().canonical() + "[" + (length ? std::to_string(*length) : std::string()) + "]";
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) s += ',';
        s += components[i].canonical();
      }
      return s + ")";
    }
  }
  return {};
}

Type parse_type(std::string_view text) { return parse_type_impl(text, 0); }

const U256& Value::uint() const {
  if (auto p = std::get_if<U256>(&v)) return *p;
  throw DecodeError("ABI value is not an integer");
}
const Address& Value::address() const {
  if (auto p = std::get_if<Address>(&v)) return *p;
  throw DecodeError("ABI value is not an address");
}
bool Value::boolean() const {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw DecodeError("ABI value is not a bool");
}
const Bytes& Value::bytes() const {
  if (auto p = std::get_if<Bytes>(&v)) return *p;
  throw DecodeError("ABI value is not a byte string");
}
const std::vector<Value>& Value::items() const {
  if (auto p = std::get_if<std::vector<Value>>(&v)) return *p;
  throw DecodeError("ABI value is not a list");
}

std::vector<Value> decode(const std::vector<Type>& types, ByteView data) { return decode_sequence(types, data, 0); }

Bytes encode(const std::vector<Type>& types, const std::vector<Value>& values) { return encode_sequence(types, values); }

std::string Function::signature() const {
  std::string s = name + "(";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ',';
    s += inputs[i].canonical();
  }
  return s + ")";
}

Bytes Function::encode_call(const std::vector<Value>& args) const {
  Bytes out(selector.bytes().begin(), selector.bytes().end());
  auto body = encode(inputs, args);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<Value> Function::decode_call(ByteView input) const {
  if (input.size() < 4 || !std::equal(selector.bytes().begin(), selector.bytes().end(), input.begin()))
    throw DecodeError("selector mismatch for " + name);
  return decode(inputs, input.subspan(4));
}

Function parse_function(std::string_view signature) {
  const auto open = signature.find('(');
  if (open == std::string_view::npos || open == 0 || signature.back() != ')')
    throw ParseError("bad function signature '" + std::string(signature) + "'");
  Function f;
  f.name = std::string(signature.substr(0, open));
  for (auto part : split_top_level(signature.substr(open + 1, signature.size() - open - 2)))
    f.inputs.push_back(parse_type(part));
  f.selector = selector_for(f.signature());
  return f;
}

std::vector<Function> parse_json_abi(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ABI file is not JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("abi")) doc = doc["abi"];
  if (!doc.is_array()) throw ParseError("ABI document must be an array");
  std::vector<Function> out;
  try {
    for (const auto& entry : doc) {
      if (entry.value("type", std::string("function")) != "function") continue;
      std::string sig = entry.at("name").get<std::string>() + "(";
      bool first = true;
      for (const auto& p : entry.value("inputs", nlohmann::json::array())) {
        if (!first) sig += ',';
        first = false;
        sig += json_param_type(p);
      }
      out.push_back(parse_function(sig + ")"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ABI entry: ") + e.what());
  }
  return out;
}

std::vector<Function> load_json_abi(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ABI file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_abi(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace phishscan::abi
