class Config:
    # default tuning values
    depth = 3
    width = 5

    def scale(self, factor):
        return self.depth * factor
