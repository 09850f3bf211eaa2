// Copyright 2026 The LARA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LARA_WIRE_H_
#define LARA_WIRE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lara/bytes.h"
#include "lara/merkle.h"
#include "lara/protocol.h"
#include "lara/verifier.h"

// Frame grammar (all integers big-endian):
//
//   frame   := length(4) type(1) payload
//   payload := correlation_id(4) body
//
// `length` counts the payload bytes. See docs/wire.md for every body.

namespace lara::wire {

inline constexpr uint32_t kMaxPayload = 256u << 20;
inline constexpr size_t kFrameHeaderSize = 5;

enum class MessageType : uint8_t {
  kGetAuditStart = 0x01,
  kAuditStart = 0x81,
  kGetFilter = 0x02,
  kFilter = 0x82,
  kGetBits = 0x03,
  kBits = 0x83,
  kGetSegmentProof = 0x04,
  kSegmentProof = 0x84,
  kRevokedNotice = 0x94,
  kAuthenticate = 0x05,
  kDecision = 0x85,
  kInstallRl = 0x06,
  kInstallAck = 0x86,
  kError = 0x7F,
};

enum class ErrorKind : uint16_t {
  kMalformedFrame = 1,
  kUnknownType = 2,
  kNoRlInstalled = 3,
  kOutOfRange = 4,
  kWrongVariant = 5,
  kInstallRejected = 6,
  kInternal = 7,
};

struct GetAuditStart {
  friend bool operator==(const GetAuditStart&, const GetAuditStart&) = default;
};
struct AuditStartMsg {
  AuditStart info;
  friend bool operator==(const AuditStartMsg&, const AuditStartMsg&) = default;
};
struct GetFilter {
  uint8_t level = 0;
  friend bool operator==(const GetFilter&, const GetFilter&) = default;
};
struct FilterMsg {
  Bytes filter;
  Signature signature;
  friend bool operator==(const FilterMsg&, const FilterMsg&) = default;
};
struct GetBits {
  std::vector<uint64_t> positions;
  friend bool operator==(const GetBits&, const GetBits&) = default;
};
struct BitsMsg {
  std::vector<bool> bits;
  friend bool operator==(const BitsMsg&, const BitsMsg&) = default;
};
struct GetSegmentProof {
  uint64_t position = 0;
  friend bool operator==(const GetSegmentProof&, const GetSegmentProof&) = default;
};
struct SegmentProofMsg {
  SegmentProof proof;
  friend bool operator==(const SegmentProofMsg&, const SegmentProofMsg&) = default;
};
struct RevokedNotice {
  friend bool operator==(const RevokedNotice&, const RevokedNotice&) = default;
};
struct Authenticate {
  AuthRequest request;
  friend bool operator==(const Authenticate&, const Authenticate&) = default;
};
struct DecisionMsg {
  Decision decision = Decision::kAccept;
  friend bool operator==(const DecisionMsg&, const DecisionMsg&) = default;
};
struct InstallRl {
  Bytes rl_file;
  friend bool operator==(const InstallRl&, const InstallRl&) = default;
};
struct InstallAck {
  uint64_t version = 0;
  friend bool operator==(const InstallAck&, const InstallAck&) = default;
};
struct ErrorMsg {
  ErrorKind kind = ErrorKind::kInternal;
  std::string message;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using Body = std::variant<GetAuditStart, AuditStartMsg, GetFilter, FilterMsg, GetBits,
                          BitsMsg, GetSegmentProof, SegmentProofMsg, RevokedNotice,
                          Authenticate, DecisionMsg, InstallRl, InstallAck, ErrorMsg>;

struct Message {
  uint32_t correlation_id = 0;
  Body body;

  MessageType type() const;
  friend bool operator==(const Message&, const Message&) = default;
};

const char* ErrorKindName(ErrorKind kind);

// Thrown for any decode failure.
class ProtocolError : public Error {
 public:
  ProtocolError(ErrorKind kind, const std::string& message)
      : Error(ErrorCode::kMalformed, message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

Bytes EncodeFrame(const Message& message);

// Reads the 5-byte header. Throws ProtocolError for oversize payloads (before
// anything is allocated) and for unknown message types.
struct FrameHeader {
  uint32_t payload_length = 0;
  MessageType type = MessageType::kError;
};
FrameHeader DecodeHeader(ByteView header);

// Decodes exactly one complete frame.
Message DecodeFrame(ByteView frame);
Message DecodePayload(MessageType type, ByteView payload);

}  // namespace lara::wire

#endif  // LARA_WIRE_H_
