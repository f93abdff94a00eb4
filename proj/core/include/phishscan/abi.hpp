#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishscan/types.hpp"

namespace phishscan::abi {

struct Type {
  enum class Kind : std::uint8_t { Uint, Int, Address, Bool, FixedBytes, Bytes, String, Array, Tuple };

  Kind kind = Kind::Uint;
  unsigned width = 256;                // bits for Uint/Int, bytes for FixedBytes
  std::optional<std::size_t> length;   // fixed array length; absent = dynamic array
  std::vector<Type> components;        // element type (Array) or members (Tuple)

  [[nodiscard]] bool is_dynamic() const;
  /// Canonical text, e.g. "(address,uint256)[]".
  [[nodiscard]] std::string canonical() const;
  /// Bytes occupied in the head section when static.
  [[nodiscard]] std::size_t head_size() const;

  friend bool operator==(const Type&, const Type&) = default;
};

/// Parses a canonical type string. Throws ParseError.
Type parse_type(std::string_view text);

struct Value {
  std::variant<U256, Address, bool, Bytes, std::vector<Value>> v;

  [[nodiscard]] const U256& uint() const;
  [[nodiscard]] const Address& address() const;
  [[nodiscard]] bool boolean() const;
  [[nodiscard]] const Bytes& bytes() const;
  [[nodiscard]] const std::vector<Value>& items() const;
  [[nodiscard]] const Value& operator[](std::size_t i) const { return items().at(i); }

  friend bool operator==(const Value&, const Value&) = default;
};

inline Value make_uint(U256 x) { return Value{std::move(x)}; }
inline Value make_address(const Address& a) { return Value{a}; }
inline Value make_bool(bool b) { return Value{b}; }
inline Value make_bytes(Bytes b) { return Value{std::move(b)}; }
inline Value make_list(std::vector<Value> items) { return Value{std::move(items)}; }

/// Decodes an argument tuple. Every offset and length is bounds-checked; throws DecodeError.
std::vector<Value> decode(const std::vector<Type>& types, ByteView data);
/// Standard head/tail encoding. Throws DecodeError when a value does not fit its type.
Bytes encode(const std::vector<Type>& types, const std::vector<Value>& values);

struct Function {
  std::string name;
  std::vector<Type> inputs;
  Selector selector;

  /// "name(type,...)" with canonical types.
  [[nodiscard]] std::string signature() const;
  /// Selector followed by encoded arguments.
  [[nodiscard]] Bytes encode_call(const std::vector<Value>& args) const;
  /// Decodes calldata whose first four bytes equal `selector`.
  [[nodiscard]] std::vector<Value> decode_call(ByteView input) const;
};

/// Parses "name(type,...)"; the selector is computed from the canonical form.
Function parse_function(std::string_view signature);

/// Functions of a standard JSON ABI document (entries with "type":"function").
std::vector<Function> parse_json_abi(std::string_view json_text);
std::vector<Function> load_json_abi(const std::filesystem::path& path);

}  // namespace phishscan::abi
