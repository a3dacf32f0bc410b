"""9-bit path tags, the packet header, and its bit-exact wire format.

Layout, most-significant bit first:

    src_gs(32) | dst_gs(32) | loop_flag(2) | curr_index(4) | tag_count(4)
    | tag_count x (direction(2) steps(7)) | zero padding to a byte boundary

with direction encoded 00=East, 01=West, 10=Prograde, 11=Retrograde.
"""
from dataclasses import dataclass, field

from .constellation import Direction, neighbor, step_between

MAX_TAGS = 15
MAX_STEPS = 127


@dataclass
class PathTag:
    direction: Direction
    steps: int

    def __post_init__(self):
        if not 0 <= self.steps <= MAX_STEPS:
            raise ValueError("tag steps out of range: %d" % self.steps)
        self.direction = Direction(self.direction)


@dataclass
class PacketHeader:
    src_gs: int
    dst_gs: int
    tags: list
    curr_index: int = 0
    loop_flag: int = 0

    @property
    def tag_count(self):
        return len(self.tags)

    def validate(self):
        if not 0 <= self.src_gs < 2**32 or not 0 <= self.dst_gs < 2**32:
            raise ValueError("GS id out of 32-bit range")
        if not 0 <= self.loop_flag <= 2:
            raise ValueError("loop_flag out of range")
        if self.tag_count > MAX_TAGS:
            raise ValueError("too many tags")
        if not 0 <= self.curr_index <= self.tag_count:
            raise ValueError("curr_index out of range")

    def copy(self):
        return PacketHeader(self.src_gs, self.dst_gs,
                            [PathTag(t.direction, t.steps) for t in self.tags],
                            self.curr_index, self.loop_flag)


def encode_path(cfg, path):
    """Tags for a satellite path: maximal same-direction runs, in traversal
    order, runs longer than 127 split."""
    tags = []
    for a, b in zip(path, path[1:]):
        d = step_between(cfg, a, b)
        if tags and tags[-1].direction == d and tags[-1].steps < MAX_STEPS:
            tags[-1].steps += 1
        else:
            tags.append(PathTag(d, 1))
    return tags


def expand_tags(cfg, tags, origin):
    """The satellite sequence obtained by walking the tags from origin."""
    path = [origin]
    for tag in tags:
        for _ in range(tag.steps):
            path.append(neighbor(cfg, path[-1], tag.direction))
    return path


class _BitWriter:
    def __init__(self):
        self.bits = []

    def put(self, value, width):
        for k in range(width - 1, -1, -1):
            self.bits.append((value >> k) & 1)

    def tobytes(self):
        while len(self.bits) % 8:
            self.bits.append(0)
        out = bytearray()
        for k in range(0, len(self.bits), 8):
            byte = 0
            for b in self.bits[k:k + 8]:
                byte = (byte << 1) | b
            out.append(byte)
        return bytes(out)


class _BitReader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def get(self, width):
        value = 0
        for _ in range(width):
            byte = self.data[self.pos // 8]
            value = (value << 1) | ((byte >> (7 - self.pos % 8)) & 1)
            self.pos += 1
        return value


def pack_header(header):
    header.validate()
    w = _BitWriter()
    w.put(header.src_gs, 32)
    w.put(header.dst_gs, 32)
    w.put(header.loop_flag, 2)
    w.put(header.curr_index, 4)
    w.put(header.tag_count, 4)
    for tag in header.tags:
        w.put(int(tag.direction), 2)
        w.put(tag.steps, 7)
    return w.tobytes()


def unpack_header(data):
    r = _BitReader(data)
    src_gs = r.get(32)
    dst_gs = r.get(32)
    loop_flag = r.get(2)
    curr_index = r.get(4)
    tag_count = r.get(4)
    if len(data) * 8 < r.pos + 9 * tag_count:
        raise ValueError("truncated header")
    tags = [PathTag(Direction(r.get(2)), r.get(7)) for _ in range(tag_count)]
    pad = len(data) * 8 - r.pos
    if pad >= 8 or r.get(pad) != 0:
        raise ValueError("bad padding")
    header = PacketHeader(src_gs, dst_gs, tags, curr_index, loop_flag)
    header.validate()
    return header
