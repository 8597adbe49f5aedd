import smach


class Cleanup(smach.StateMachine):
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done"])
        # the next line mentions a class but is indented
        helper_class = "class Foo"
        with self:
            smach.StateMachine.add("CLEAN", Clean(robot), transitions={"done": "done"})
    class_count = 1
classify = None
