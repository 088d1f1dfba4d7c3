#pragma once

#include <cassert>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

namespace docubits {

// Why a proposal or a pure operation was refused. Rejections are values,
// never faults: every refused proposal maps to exactly one reason.
enum class Reason {
  NotOwner,
  AlreadyCompleted,
  NoDocument,
  AlreadyFragmented,
  UnknownBit,
  OverlapsExisting,
  EmptyAfterTrim,
  NoSteps,
  MalformedNumbering,
  MoreUsersThanGroups,
  SelfClaim,
  NoChange,
  BadSpan,
  // Actor has not joined, or has left.
  UnknownUser,
  // Payload failed structural validation (bad pose, bad cohesion, ...).
  Malformed,
};

std::string_view to_string(Reason r);
std::optional<Reason> reason_from_string(std::string_view s);

template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Reason r) : v_(r) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<0>(v_);
  }
  T& value() & {
    assert(ok());
    return std::get<0>(v_);
  }
  T&& value() && {
    assert(ok());
    return std::get<0>(std::move(v_));
  }
  Reason error() const {
    assert(!ok());
    return std::get<1>(v_);
  }

  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, Reason> v_;
};

}  // namespace docubits
