# burstscale Tests Package
