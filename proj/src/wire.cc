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

#include "lara/wire.h"

#include <algorithm>

namespace lara::wire {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool IsKnownType(uint8_t t) {
  switch (static_cast<MessageType>(t)) {
    case MessageType::kGetAuditStart:
    case MessageType::kAuditStart:
    case MessageType::kGetFilter:
    case MessageType::kFilter:
    case MessageType::kGetBits:
    case MessageType::kBits:
    case MessageType::kGetSegmentProof:
    case MessageType::kSegmentProof:
    case MessageType::kRevokedNotice:
    case MessageType::kAuthenticate:
    case MessageType::kDecision:
    case MessageType::kInstallRl:
    case MessageType::kInstallAck:
    case MessageType::kError:
      return true;
  }
  return false;
}

void EncodeAuditStart(ByteWriter& w, const AuditStart& s) {
  w.U64(s.version);
  w.U64(s.epoch);
  w.Append(s.seed.view());
  w.U8(static_cast<uint8_t>(s.encoding));
  w.U8(static_cast<uint8_t>(s.filters.size()));
  for (const FilterDescriptor& f : s.filters) {
    w.U64(f.n_bits);
    w.U8(static_cast<uint8_t>(f.k));
    w.Append(f.salt);
  }
  if (s.encoding == RlEncoding::kRedactable) {
    w.Append(s.root.view());
    w.U32(s.segment_size_bits);
    w.U64(s.leaf_count);
    w.Append(s.root_signature.view());
  }
}

AuditStart DecodeAuditStart(ByteReader& r) {
  AuditStart s;
  s.version = r.U64();
  s.epoch = r.U64();
  s.seed = r.ReadFixed<Seed>();
  const uint8_t tag = r.U8();
  if (tag < 1 || tag > 3) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "unknown RL variant in audit start");
  }
  s.encoding = static_cast<RlEncoding>(tag);
  const uint8_t count = r.U8();
  if (count == 0 || (s.encoding != RlEncoding::kHbfa && count != 1)) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "bad filter count in audit start");
  }
  for (uint8_t i = 0; i < count; ++i) {
    FilterDescriptor f;
    f.n_bits = r.U64();
    f.k = r.U8();
    ByteView salt = r.Read(f.salt.size());
    std::copy(salt.begin(), salt.end(), f.salt.begin());
    s.filters.push_back(f);
  }
  if (s.encoding == RlEncoding::kRedactable) {
    s.root = r.ReadFixed<Digest>();
    s.segment_size_bits = r.U32();
    s.leaf_count = r.U64();
    s.root_signature = r.ReadFixed<Signature>();
  }
  return s;
}

}  // namespace

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedFrame: return "malformed-frame";
    case ErrorKind::kUnknownType: return "unknown-type";
    case ErrorKind::kNoRlInstalled: return "no-rl-installed";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kWrongVariant: return "wrong-variant";
    case ErrorKind::kInstallRejected: return "install-rejected";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

MessageType Message::type() const {
  static constexpr MessageType kTypes[] = {
      MessageType::kGetAuditStart, MessageType::kAuditStart,
      MessageType::kGetFilter,     MessageType::kFilter,
      MessageType::kGetBits,       MessageType::kBits,
      MessageType::kGetSegmentProof, MessageType::kSegmentProof,
      MessageType::kRevokedNotice, MessageType::kAuthenticate,
      MessageType::kDecision,      MessageType::kInstallRl,
      MessageType::kInstallAck,    MessageType::kError,
  };
  static_assert(std::size(kTypes) == std::variant_size_v<Body>);
  return kTypes[body.index()];
}

Bytes EncodeFrame(const Message& message) {
  ByteWriter w;
  w.U32(0);  // patched below
  w.U8(static_cast<uint8_t>(message.type()));
  w.U32(message.correlation_id);
  std::visit(
      Overloaded{
          [](const GetAuditStart&) {},
          [&](const AuditStartMsg& m) { EncodeAuditStart(w, m.info); },
          [&](const GetFilter& m) { w.U8(m.level); },
          [&](const FilterMsg& m) {
            w.U32(static_cast<uint32_t>(m.filter.size()));
            w.Append(m.filter);
            w.Append(m.signature.view());
          },
          [&](const GetBits& m) {
            if (m.positions.size() > 0xffff) {
              throw Error(ErrorCode::kInvalidArgument, "too many bit positions");
            }
            w.U16(static_cast<uint16_t>(m.positions.size()));
            for (uint64_t p : m.positions) w.U64(p);
          },
          [&](const BitsMsg& m) {
            if (m.bits.size() > 0xffff) {
              throw Error(ErrorCode::kInvalidArgument, "too many bits");
            }
            w.U16(static_cast<uint16_t>(m.bits.size()));
            Bytes bitmap((m.bits.size() + 7) / 8, 0);
            for (size_t i = 0; i < m.bits.size(); ++i) {
              if (m.bits[i]) bitmap[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
            }
            w.Append(bitmap);
          },
          [&](const GetSegmentProof& m) { w.U64(m.position); },
          [&](const SegmentProofMsg& m) { w.Append(m.proof.Encode()); },
          [](const RevokedNotice&) {},
          [&](const Authenticate& m) { w.Append(m.request.Encode()); },
          [&](const DecisionMsg& m) { w.U8(static_cast<uint8_t>(m.decision)); },
          [&](const InstallRl& m) { w.Append(m.rl_file); },
          [&](const InstallAck& m) { w.U64(m.version); },
          [&](const ErrorMsg& m) {
            const size_t len = std::min<size_t>(m.message.size(), 0xffff);
            w.U16(static_cast<uint16_t>(m.kind));
            w.U16(static_cast<uint16_t>(len));
            w.Append(AsBytes(std::string_view(m.message).substr(0, len)));
          },
      },
      message.body);
  Bytes frame = w.Take();
  const size_t payload = frame.size() - kFrameHeaderSize;
  if (payload > kMaxPayload) {
    throw Error(ErrorCode::kInvalidArgument, "frame exceeds maximum size");
  }
  frame[0] = static_cast<uint8_t>(payload >> 24);
  frame[1] = static_cast<uint8_t>(payload >> 16);
  frame[2] = static_cast<uint8_t>(payload >> 8);
  frame[3] = static_cast<uint8_t>(payload);
  return frame;
}

FrameHeader DecodeHeader(ByteView header) {
  if (header.size() < kFrameHeaderSize) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "truncated frame header");
  }
  FrameHeader h;
  h.payload_length = uint32_t{header[0]} << 24 | uint32_t{header[1]} << 16 |
                     uint32_t{header[2]} << 8 | uint32_t{header[3]};
  if (h.payload_length > kMaxPayload) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "frame exceeds maximum size");
  }
  if (h.payload_length < 4) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "frame lacks correlation id");
  }
  if (!IsKnownType(header[4])) {
    throw ProtocolError(ErrorKind::kUnknownType, "unknown message type");
  }
  h.type = static_cast<MessageType>(header[4]);
  return h;
}

Message DecodeFrame(ByteView frame) {
  const FrameHeader h = DecodeHeader(frame);
  if (frame.size() - kFrameHeaderSize != h.payload_length) {
    throw ProtocolError(ErrorKind::kMalformedFrame, "frame length mismatch");
  }
  return DecodePayload(h.type, frame.subspan(kFrameHeaderSize));
}

Message DecodePayload(MessageType type, ByteView payload) {
  try {
    ByteReader r(payload);
    Message m;
    m.correlation_id = r.U32();
    switch (type) {
      case MessageType::kGetAuditStart:
        m.body = GetAuditStart{};
        break;
      case MessageType::kAuditStart:
        m.body = AuditStartMsg{DecodeAuditStart(r)};
        break;
      case MessageType::kGetFilter:
        m.body = GetFilter{r.U8()};
        break;
      case MessageType::kFilter: {
        FilterMsg f;
        ByteView bytes = r.Read(r.U32());
        f.filter.assign(bytes.begin(), bytes.end());
        f.signature = r.ReadFixed<Signature>();
        m.body = std::move(f);
        break;
      }
      case MessageType::kGetBits: {
        GetBits g;
        const uint16_t count = r.U16();
        if (r.remaining() != size_t{count} * 8) {
          throw ProtocolError(ErrorKind::kMalformedFrame, "bit request length mismatch");
        }
        g.positions.reserve(count);
        for (uint16_t i = 0; i < count; ++i) g.positions.push_back(r.U64());
        m.body = std::move(g);
        break;
      }
      case MessageType::kBits: {
        BitsMsg b;
        const uint16_t count = r.U16();
        ByteView bitmap = r.Read((size_t{count} + 7) / 8);
        for (size_t i = 0; i < count; ++i) b.bits.push_back((bitmap[i / 8] >> (i % 8)) & 1);
        if (count % 8 != 0 && (bitmap.back() >> (count % 8)) != 0) {
          throw ProtocolError(ErrorKind::kMalformedFrame, "nonzero bitmap padding");
        }
        m.body = std::move(b);
        break;
      }
      case MessageType::kGetSegmentProof:
        m.body = GetSegmentProof{r.U64()};
        break;
      case MessageType::kSegmentProof:
        m.body = SegmentProofMsg{SegmentProof::Decode(r.Rest())};
        break;
      case MessageType::kRevokedNotice:
        m.body = RevokedNotice{};
        break;
      case MessageType::kAuthenticate:
        m.body = Authenticate{AuthRequest::Decode(r.Rest())};
        break;
      case MessageType::kDecision: {
        const uint8_t code = r.U8();
        if (code > static_cast<uint8_t>(Decision::kRejectBadToken)) {
          throw ProtocolError(ErrorKind::kMalformedFrame, "unknown decision code");
        }
        m.body = DecisionMsg{static_cast<Decision>(code)};
        break;
      }
      case MessageType::kInstallRl: {
        ByteView rest = r.Rest();
        m.body = InstallRl{Bytes(rest.begin(), rest.end())};
        break;
      }
      case MessageType::kInstallAck:
        m.body = InstallAck{r.U64()};
        break;
      case MessageType::kError: {
        ErrorMsg e;
        e.kind = static_cast<ErrorKind>(r.U16());
        ByteView text = r.Read(r.U16());
        e.message.assign(text.begin(), text.end());
        m.body = std::move(e);
        break;
      }
      default:
        throw ProtocolError(ErrorKind::kUnknownType, "unknown message type");
    }
    r.ExpectEnd("frame payload");
    return m;
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(ErrorKind::kMalformedFrame, e.what());
  }
}

}  // namespace lara::wire
