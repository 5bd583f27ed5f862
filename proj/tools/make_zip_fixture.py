#!/usr/bin/env python3
"""Writes tests/fixtures/secret.zip: one deflated ZipCrypto member, password "secret".

The encryptor here is written from the PKWARE APPNOTE description and shares no
code with the C++ library; the result is checked with the standard zipfile module.
"""
import binascii
import io
import struct
import sys
import zipfile
import zlib

PASSWORD = b"secret"
NAME = b"evidence.txt"
TEXT = b"meeting moved to the north pier at 0400\n" * 8


def crc_byte(crc, b):
    return binascii.crc32(bytes([b]), crc ^ 0xFFFFFFFF) ^ 0xFFFFFFFF


class Keys:
    def __init__(self, password):
        self.k = [0x12345678, 0x23456789, 0x34567890]
        for b in password:
            self.update(b)

    def update(self, b):
        k0, k1, k2 = self.k
        k0 = crc_byte(k0, b)
        k1 = (k1 + (k0 & 0xFF)) & 0xFFFFFFFF
        k1 = (k1 * 134775813 + 1) & 0xFFFFFFFF
        k2 = crc_byte(k2, (k1 >> 24) & 0xFF)
        self.k = [k0, k1, k2]

    def encrypt(self, b):
        t = (self.k[2] | 2) & 0xFFFF
        c = b ^ (((t * (t ^ 1)) >> 8) & 0xFF)
        self.update(b)
        return c


def build():
    crc = zlib.crc32(TEXT)
    comp = zlib.compressobj(9, zlib.DEFLATED, -15)
    deflated = comp.compress(TEXT) + comp.flush()
    keys = Keys(PASSWORD)
    header = bytes([0x5A, 0x17, 0x3C, 0x99, 0x01, 0x42, 0xE7, 0x08, 0x61, 0xD0, 0x2B]) + bytes([crc >> 24])
    body = bytes(keys.encrypt(b) for b in header + deflated)
    flags, method, mtime, mdate = 1, 8, 0, 0x21  # 1980-01-01
    local = struct.pack("<IHHHHHIIIHH", 0x04034B50, 20, flags, method, mtime, mdate, crc, len(body), len(TEXT),
                        len(NAME), 0) + NAME
    central = struct.pack("<IHHHHHHIIIHHHHHII", 0x02014B50, 20, 20, flags, method, mtime, mdate, crc, len(body),
                          len(TEXT), len(NAME), 0, 0, 0, 0, 0, 0) + NAME
    cd_offset = len(local) + len(body)
    eocd = struct.pack("<IHHHHIIH", 0x06054B50, 0, 0, 1, 1, len(central), cd_offset, 0)
    return local + body + central + eocd


def main():
    data = build()
    with zipfile.ZipFile(io.BytesIO(data)) as z:
        assert z.read(NAME.decode(), pwd=PASSWORD) == TEXT
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/secret.zip"
    with open(out, "wb") as f:
        f.write(data)
    print(out, len(data), "bytes, crc32 %08x" % zlib.crc32(TEXT))


if __name__ == "__main__":
    main()
