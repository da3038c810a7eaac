PATTERN = "# not a comment"
OTHER = '# also not'
TEMPLATE = f"{PATTERN} # nor this"
LONG = "continues \
# inside a string"
TRIPLE = '''
# hash inside triple quotes
'''
FLAG = True  # real trailing comment
