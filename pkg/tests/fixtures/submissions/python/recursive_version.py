def avgWordLength(words):
    for _ in words:
        pass
    if len(words) == 1:
        return float(len(words[0]))
    first = len(words[0])
    rest = avgWordLength(words[1:]) * (len(words) - 1)
    return (first + rest) / len(words)
