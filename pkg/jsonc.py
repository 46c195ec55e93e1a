"""
ptlab.jsonc
~~~~~~~~~~~

JSON with // line comments and /* block */ comments, used for config.json.
Comments are blanked rather than removed so json error positions still point
at the right line.
"""

import json


def _blank(segment):
    return ''.join(c if c == '\n' else ' ' for c in segment)


def strip_comments(text):
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == '\\' else 1
            out.append(text[i:j + 1])
            i = j + 1
        elif text.startswith('//', i):
            j = text.find('\n', i)
            j = n if j < 0 else j
            out.append(_blank(text[i:j]))
            i = j
        elif text.startswith('/*', i):
            j = text.find('*/', i + 2)
            if j < 0:
                raise ValueError('Invalid config: unterminated block comment')
            out.append(_blank(text[i:j + 2]))
            i = j + 2
        else:
            out.append(c)
            i += 1
    return ''.join(out)


def loads(text):
    return json.loads(strip_comments(text))


def load(fp):
    return loads(fp.read())
