"""Group arithmetic, transforms, masks, MRA checks and the pattern atlas."""
