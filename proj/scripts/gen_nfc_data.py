#!/usr/bin/env python3
"""Regenerate src/nfc_data.inc from the Python unicodedata tables.

Emits three sorted arrays consumed by src/utf8.cpp:
  - canonical full decompositions (NFD of each code point, Hangul excluded)
  - nonzero canonical combining classes
  - primary composition pairs (exclusions already filtered out)

Usage: python3 scripts/gen_nfc_data.py > src/nfc_data.inc
"""

import sys
import unicodedata

HANGUL_S_BASE = 0xAC00
HANGUL_S_LAST = 0xD7A3


def main():
    decomp = []  # (cp, [cps...]) fully expanded canonical decomposition
    ccc = []     # (cp, class)
    comp = []    # (a, b, composed)

    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)

        k = unicodedata.combining(ch)
        if k:
            ccc.append((cp, k))

        if HANGUL_S_BASE <= cp <= HANGUL_S_LAST:
            continue  # algorithmic in code

        nfd = unicodedata.normalize("NFD", ch)
        if nfd != ch:
            decomp.append((cp, [ord(c) for c in nfd]))

        raw = unicodedata.decomposition(ch)
        if raw and not raw.startswith("<"):
            parts = [int(x, 16) for x in raw.split()]
            if len(parts) == 2:
                a, b = parts
                # Composition exclusions and non-starter decompositions fall
                # out of this round-trip check automatically.
                if unicodedata.normalize("NFC", chr(a) + chr(b)) == ch:
                    comp.append((a, b, cp))

    comp.sort()

    pool = []
    index = []
    for cp, seq in decomp:
        index.append((cp, len(pool), len(seq)))
        pool.extend(seq)

    out = sys.stdout
    out.write("// Generated by scripts/gen_nfc_data.py (Unicode %s). Do not edit.\n"
              % unicodedata.unidata_version)
    out.write("// clang-format off\n")

    out.write("static const NfcDecompEntry kNfcDecompIndex[] = {\n")
    for cp, off, n in index:
        out.write("{0x%X,%d,%d},\n" % (cp, off, n))
    out.write("};\n")

    out.write("static const char32_t kNfcDecompPool[] = {\n")
    for i in range(0, len(pool), 12):
        out.write(",".join("0x%X" % c for c in pool[i:i + 12]) + ",\n")
    out.write("};\n")

    out.write("static const NfcCccEntry kNfcCcc[] = {\n")
    for cp, k in ccc:
        out.write("{0x%X,%d},\n" % (cp, k))
    out.write("};\n")

    out.write("static const NfcCompEntry kNfcCompose[] = {\n")
    for a, b, c in comp:
        out.write("{0x%X,0x%X,0x%X},\n" % (a, b, c))
    out.write("};\n")
    out.write("// clang-format on\n")


if __name__ == "__main__":
    main()
